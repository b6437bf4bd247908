//! Proof-script semantics: checked definitions, checked lemmas as prover
//! tasks over an accumulating premise pool, and the TPI directives.

mod cases;
mod export;
mod run;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use cases::{expand_cases, CaseError};
pub use export::{export_tasks, sanitize_file_stem, ExportError, Manifest, ManifestEntry, MANIFEST_FILE};
pub use run::{run, Report, RunOptions, TaskReport};

use crate::formula_ops::{
    expand_definitions, formula_symbols, recognize_definition, split_conjunction, Definition, DefinitionError, ExpandError,
    SymbolTable,
};
use crate::prover::Problem;
use crate::syntax::{AnnotatedStatement, ProofScript, Role, ScriptItem, Span, TpiInstruction, TpiPayload};

/// Marker suffix that asks for a lemma to be proved conjunct by conjunct.
pub const SPLIT_SUFFIX: &str = "_split";

/// One conjecture with the exact premises it may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverTask {
    pub id: String,
    /// Role `conjecture`, no source annotation.
    pub conjecture: AnnotatedStatement,
    /// All re-roled to `axiom`, no source annotations.
    pub premises: Vec<AnnotatedStatement>,
    /// Which item and transformation produced the task.
    pub origin: String,
    /// Ids of earlier tasks certifying premises of this one.
    pub depends_on: Vec<String>,
}

impl ProverTask {
    pub fn problem(&self) -> Problem<'_> {
        Problem {
            name: &self.id,
            premises: &self.premises,
            conjecture: &self.conjecture,
        }
    }

    pub fn to_tptp(&self) -> String {
        self.problem().to_tptp()
    }

    pub fn premise_names(&self) -> Vec<&str> {
        self.premises.iter().map(|p| p.name.as_str()).collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Plan {
    pub tasks: Vec<ProverTask>,
    /// Lemmas accepted without proof.
    pub skipped: Vec<String>,
    pub symbol_table: SymbolTable,
    /// Pooled statements in script order, as they stood at the end.
    pub pool: Vec<AnnotatedStatement>,
    /// Original roles of pooled statements.
    pub pool_roles: BTreeMap<String, Role>,
}

impl Plan {
    pub fn task(&self, id: &str) -> Option<&ProverTask> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn task_ids(&self) -> Vec<&str> {
        self.tasks.iter().map(|t| t.id.as_str()).collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct PlanOptions {
    /// Treat everything before this lemma as already verified.
    pub from: Option<String>,
}

fn at(span: &Option<Span>) -> String {
    span.map(|s| format!("{s}: ")).unwrap_or_default()
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("{}{source}", at(.span))]
    Definition {
        source: DefinitionError,
        span: Option<Span>,
    },
    #[error("{}instruction `{instruction}` refers to unknown statement `{name}`", at(.span))]
    UnknownName {
        instruction: String,
        name: String,
        span: Option<Span>,
    },
    #[error("{}instruction `{instruction}`: `{name}` is not a checked_lemma", at(.span))]
    NotALemma {
        instruction: String,
        name: String,
        span: Option<Span>,
    },
    #[error("instruction `{instruction}`: premise `{premise}` of `{lemma}` is not yet available")]
    PremiseNotAvailable {
        instruction: String,
        lemma: String,
        premise: String,
    },
    #[error("instruction `{instruction}`: `{name}` is not a validated checked_definition at this point")]
    NotADefinition { instruction: String, name: String },
    #[error("expanding definitions in `{statement}`: {source}")]
    Expand { statement: String, source: ExpandError },
    #[error("instruction `{instruction}`: {source}")]
    Cases { instruction: String, source: CaseError },
    #[error("instruction `{instruction}`: cases lemma `{cases}` must come before `{target}`")]
    CasesNotPooled {
        instruction: String,
        cases: String,
        target: String,
    },
    #[error("{}instruction `{instruction}` repeats a directive for `{name}`", at(.span))]
    DuplicateDirective {
        instruction: String,
        name: String,
        span: Option<Span>,
    },
    #[error("{}statement `{name}` has role {role}, which has no meaning in a proof script", at(.span))]
    UnsupportedRole {
        name: String,
        role: Role,
        span: Option<Span>,
    },
    #[error("--from names `{0}`, which is not a checked_lemma of the script")]
    UnknownFrom(String),
}

/// Keyed directives, gathered before the ordered pass.
#[derive(Default)]
struct Directives<'s> {
    restrict: BTreeMap<&'s str, (&'s TpiInstruction, &'s [String])>,
    expand: BTreeMap<&'s str, Vec<(&'s TpiInstruction, &'s [String])>>,
    cases: BTreeMap<&'s str, (&'s TpiInstruction, &'s str)>,
}

impl<'s> Directives<'s> {
    fn collect(script: &'s ProofScript) -> Result<Self, PlanError> {
        let roles: BTreeMap<&str, Role> = script.statements().map(|s| (s.name.as_str(), s.role)).collect();
        let lemma = |t: &TpiInstruction, name: &str| match roles.get(name) {
            None => Err(PlanError::UnknownName {
                instruction: t.name.clone(),
                name: name.to_owned(),
                span: t.span,
            }),
            Some(Role::CheckedLemma) => Ok(()),
            Some(_) => Err(PlanError::NotALemma {
                instruction: t.name.clone(),
                name: name.to_owned(),
                span: t.span,
            }),
        };
        let duplicate = |t: &TpiInstruction, name: &str| PlanError::DuplicateDirective {
            instruction: t.name.clone(),
            name: name.to_owned(),
            span: t.span,
        };
        let mut d = Directives::default();
        for item in &script.items {
            let ScriptItem::Tpi(t) = item else { continue };
            match &t.payload {
                TpiPayload::AssumePreviousValid { .. } => {}
                TpiPayload::RestrictPremises { lemma: l, premises } => {
                    lemma(t, l)?;
                    if d.restrict.insert(l, (t, premises)).is_some() {
                        return Err(duplicate(t, l));
                    }
                }
                TpiPayload::ExpandDefinitionsIn { statement, definitions } => {
                    if !roles.contains_key(statement.as_str()) {
                        return Err(PlanError::UnknownName {
                            instruction: t.name.clone(),
                            name: statement.clone(),
                            span: t.span,
                        });
                    }
                    d.expand.entry(statement).or_default().push((t, definitions));
                }
                TpiPayload::AddCases { cases, target } => {
                    lemma(t, cases)?;
                    lemma(t, target)?;
                    if d.cases.insert(target, (t, cases)).is_some() {
                        return Err(duplicate(t, target));
                    }
                }
            }
        }
        Ok(d)
    }
}

struct Planner<'s> {
    directives: Directives<'s>,
    pool: Vec<AnnotatedStatement>,
    pool_roles: BTreeMap<String, Role>,
    symbols: SymbolTable,
    defs: BTreeMap<String, Definition>,
    tasks: Vec<ProverTask>,
    /// Lemma each task belongs to; `None` for plain conjectures.
    owners: Vec<Option<String>>,
    lemmas: Vec<String>,
    skipped: Vec<String>,
    /// Statement name to the task ids that certify it.
    certify: BTreeMap<String, Vec<String>>,
}

/// Plans `script` with default options.
pub fn plan(script: &ProofScript) -> Result<Plan, PlanError> {
    plan_with(script, &PlanOptions::default())
}

pub fn plan_with(script: &ProofScript, opts: &PlanOptions) -> Result<Plan, PlanError> {
    if let Some(from) = &opts.from {
        if script.statement(from).map(|s| s.role) != Some(Role::CheckedLemma) {
            return Err(PlanError::UnknownFrom(from.clone()));
        }
    }
    let mut p = Planner {
        directives: Directives::collect(script)?,
        pool: Vec::new(),
        pool_roles: BTreeMap::new(),
        symbols: SymbolTable::default(),
        defs: BTreeMap::new(),
        tasks: Vec::new(),
        owners: Vec::new(),
        lemmas: Vec::new(),
        skipped: Vec::new(),
        certify: BTreeMap::new(),
    };
    for item in &script.items {
        match item {
            ScriptItem::Statement(s) => {
                if opts.from.as_deref() == Some(s.name.as_str()) {
                    p.apply_assume_valid();
                }
                p.statement(s)?;
            }
            ScriptItem::Tpi(t) => {
                if let TpiPayload::AssumePreviousValid { .. } = t.payload {
                    p.apply_assume_valid();
                }
            }
        }
    }
    Ok(p.finish())
}

/// Applies the script's `expand_definitions_in` instructions, plus the
/// definitions named in `extra` to every later statement, and drops the
/// applied instructions. Definitions must be validated before their use.
pub fn expand_script(script: &ProofScript, extra: &[String]) -> Result<ProofScript, PlanError> {
    let mut p = Planner {
        directives: Directives::collect(script)?,
        pool: Vec::new(),
        pool_roles: BTreeMap::new(),
        symbols: SymbolTable::default(),
        defs: BTreeMap::new(),
        tasks: Vec::new(),
        owners: Vec::new(),
        lemmas: Vec::new(),
        skipped: Vec::new(),
        certify: BTreeMap::new(),
    };
    let mut seen_extra = BTreeSet::new();
    let mut items = Vec::new();
    for item in &script.items {
        match item {
            ScriptItem::Tpi(t) if matches!(t.payload, TpiPayload::ExpandDefinitionsIn { .. }) => {}
            ScriptItem::Tpi(t) => items.push(ScriptItem::Tpi(t.clone())),
            ScriptItem::Statement(original) => {
                let mut s = p.apply_expand_definitions_in(original)?;
                let defs: Vec<Definition> = extra
                    .iter()
                    .filter(|n| **n != s.name)
                    .filter_map(|n| p.defs.get(n))
                    .cloned()
                    .collect();
                if !defs.is_empty() {
                    s.formula = expand_definitions(&s.formula, &defs).map_err(|source| PlanError::Expand {
                        statement: s.name.clone(),
                        source,
                    })?;
                }
                if s.role == Role::CheckedDefinition {
                    let def = recognize_definition(&s, &p.symbols).map_err(|source| PlanError::Definition {
                        source,
                        span: s.span,
                    })?;
                    p.symbols.insert(def.head.clone());
                    p.defs.insert(s.name.clone(), def);
                    if extra.contains(&s.name) {
                        seen_extra.insert(s.name.clone());
                    }
                } else {
                    p.symbols.extend(formula_symbols(&s.formula));
                }
                items.push(ScriptItem::Statement(s));
            }
        }
    }
    if let Some(missing) = extra.iter().find(|n| !seen_extra.contains(*n)) {
        return Err(PlanError::NotADefinition {
            instruction: "--def".into(),
            name: missing.clone(),
        });
    }
    Ok(ProofScript { items })
}

fn as_premise(s: &AnnotatedStatement) -> AnnotatedStatement {
    let mut out = s.with_role(Role::Axiom);
    out.source = None;
    out
}

fn as_conjecture(s: &AnnotatedStatement) -> AnnotatedStatement {
    let mut out = s.with_role(Role::Conjecture);
    out.source = None;
    out
}

impl<'s> Planner<'s> {
    fn statement(&mut self, original: &AnnotatedStatement) -> Result<(), PlanError> {
        let s = self.apply_expand_definitions_in(original)?;
        match s.role {
            Role::Axiom | Role::Hypothesis | Role::Definition => {
                self.symbols.extend(formula_symbols(&s.formula));
                self.pool_statement(&s);
            }
            Role::CheckedDefinition => {
                let def = recognize_definition(&s, &self.symbols).map_err(|source| PlanError::Definition {
                    source,
                    span: s.span,
                })?;
                self.symbols.insert(def.head.clone());
                self.defs.insert(s.name.clone(), def);
                self.pool_statement(&s);
            }
            Role::CheckedLemma => {
                self.lemma(&s)?;
                self.lemmas.push(s.name.clone());
                self.pool_statement(&s);
            }
            Role::Conjecture => {
                let premises = self.pool.clone();
                self.push_task(None, &s, &s.name, premises, format!("conjecture {}", s.name));
            }
            role @ (Role::Plain | Role::Lemma | Role::NegatedConjecture) => {
                return Err(PlanError::UnsupportedRole {
                    name: s.name.clone(),
                    role,
                    span: s.span,
                })
            }
        }
        Ok(())
    }

    fn pool_statement(&mut self, s: &AnnotatedStatement) {
        self.pool_roles.insert(s.name.clone(), s.role);
        self.pool.push(as_premise(s));
    }

    fn push_task(&mut self, owner: Option<&str>, conj: &AnnotatedStatement, id: &str, premises: Vec<AnnotatedStatement>, origin: String) {
        let mut conjecture = as_conjecture(conj);
        conjecture.name = id.to_owned();
        self.tasks.push(ProverTask {
            id: id.to_owned(),
            conjecture,
            premises,
            origin,
            depends_on: Vec::new(),
        });
        self.owners.push(owner.map(str::to_owned));
        self.certify.entry(conj.name.clone()).or_default().push(id.to_owned());
    }

    fn lemma(&mut self, s: &AnnotatedStatement) -> Result<(), PlanError> {
        let premises = self.apply_restrict_premises(&s.name)?;
        let name = s.name.as_str();
        if let Some(&(instr, cases_name)) = self.directives.cases.get(name) {
            let Some(cases) = self.pool.iter().find(|p| p.name == cases_name).cloned() else {
                return Err(PlanError::CasesNotPooled {
                    instruction: instr.name.clone(),
                    cases: cases_name.to_owned(),
                    target: name.to_owned(),
                });
            };
            let generated = expand_cases(&cases, s).map_err(|source| PlanError::Cases {
                instruction: instr.name.clone(),
                source,
            })?;
            let mut recombination = vec![cases];
            for (i, case) in generated.iter().enumerate() {
                let origin = format!("case {} of {} via add_cases {}", i + 1, name, instr.name);
                self.push_task(Some(name), case, &case.name, premises.clone(), origin);
                recombination.push(as_premise(case));
            }
            let origin = format!("recombination of {name} from its cases via add_cases {}", instr.name);
            self.push_task(Some(name), s, name, recombination, origin);
            return Ok(());
        }
        if name.ends_with(SPLIT_SUFFIX) {
            let parts = split_conjunction(s);
            if parts.len() > 1 {
                for (i, part) in parts.iter().enumerate() {
                    let origin = format!("conjunct {} of {name}", i + 1);
                    self.push_task(Some(name), part, &part.name, premises.clone(), origin);
                    self.certify.entry(name.to_owned()).or_default().push(part.name.clone());
                }
                return Ok(());
            }
        }
        self.push_task(Some(name), s, name, premises, format!("checked_lemma {name}"));
        Ok(())
    }

    /// Drops the tasks of every lemma planned so far.
    fn apply_assume_valid(&mut self) {
        let planned: BTreeSet<&String> = self.lemmas.iter().collect();
        let mut keep = Vec::new();
        let mut owners = Vec::new();
        for (task, owner) in self.tasks.drain(..).zip(self.owners.drain(..)) {
            if owner.as_ref().is_some_and(|o| planned.contains(o)) {
                continue;
            }
            keep.push(task);
            owners.push(owner);
        }
        self.tasks = keep;
        self.owners = owners;
        for l in &self.lemmas {
            if !self.skipped.contains(l) {
                self.skipped.push(l.clone());
            }
        }
    }

    /// The premise list for `lemma`: the restricted names, or the whole pool.
    fn apply_restrict_premises(&self, lemma: &str) -> Result<Vec<AnnotatedStatement>, PlanError> {
        let Some(&(instr, names)) = self.directives.restrict.get(lemma) else {
            return Ok(self.pool.clone());
        };
        names
            .iter()
            .map(|n| {
                self.pool.iter().find(|p| &p.name == n).cloned().ok_or_else(|| PlanError::PremiseNotAvailable {
                    instruction: instr.name.clone(),
                    lemma: lemma.to_owned(),
                    premise: n.clone(),
                })
            })
            .collect()
    }

    fn apply_expand_definitions_in(&self, s: &AnnotatedStatement) -> Result<AnnotatedStatement, PlanError> {
        let mut out = s.clone();
        let Some(list) = self.directives.expand.get(s.name.as_str()) else {
            return Ok(out);
        };
        for (instr, names) in list {
            let defs = names
                .iter()
                .map(|n| {
                    self.defs.get(n).cloned().ok_or_else(|| PlanError::NotADefinition {
                        instruction: instr.name.clone(),
                        name: n.clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.formula = expand_definitions(&out.formula, &defs).map_err(|source| PlanError::Expand {
                statement: s.name.clone(),
                source,
            })?;
        }
        Ok(out)
    }

    fn finish(mut self) -> Plan {
        let live: BTreeSet<String> = self.tasks.iter().map(|t| t.id.clone()).collect();
        for task in &mut self.tasks {
            let mut deps: Vec<String> = Vec::new();
            for p in &task.premises {
                for id in self.certify.get(&p.name).into_iter().flatten() {
                    if live.contains(id) && id != &task.id && !deps.contains(id) {
                        deps.push(id.clone());
                    }
                }
            }
            task.depends_on = deps;
        }
        Plan {
            tasks: self.tasks,
            skipped: self.skipped,
            symbol_table: self.symbols,
            pool: self.pool,
            pool_roles: self.pool_roles,
        }
    }
}

#[cfg(test)]
mod tests;
