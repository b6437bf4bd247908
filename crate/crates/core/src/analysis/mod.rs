//! Prover derivations: parsing TSTP output into graphs, DOT export and
//! unused-lemma detection.

mod dot;
mod unused;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::syntax::{
    parse_annotation, split_tstp, AnnotatedStatement, Formula, GeneralTerm, Language, ParseError, ParseOptions,
    Parser, RawItem, Role,
};

pub use dot::{smoke_parse_dot, to_dot, overview_dot, DotMode, DotSummary};
pub use unused::{alpha_equivalent, unused_lemmas, UnusedReport};

/// Rule name recorded for statements without an `inference(...)` source.
pub const INPUT_RULE: &str = "input";

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub name: String,
    pub language: Language,
    pub role: Role,
    pub formula: Formula,
    /// `inference` rule, or [`INPUT_RULE`].
    pub rule: String,
    /// Name given in a `file(path, name)` source: the statement's name in the
    /// problem the prover read.
    pub input_name: Option<String>,
    /// Source is `file(...)`, as opposed to `introduced(...)` or inference.
    pub from_file: bool,
}

impl Node {
    pub fn is_input(&self) -> bool {
        self.rule == INPUT_RULE
    }

    /// The name to match against script statements.
    pub fn original_name(&self) -> &str {
        self.input_name.as_deref().unwrap_or(&self.name)
    }
}

/// Inference steps of one derivation. Edges run from premise to conclusion.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DerivationGraph {
    pub nodes: Vec<Node>,
    pub edges: BTreeSet<(usize, usize)>,
    /// Lines outside statements that were not comments.
    pub skipped_lines: usize,
    index: HashMap<String, usize>,
}

#[derive(Debug, Error)]
pub enum DerivationError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("statement `{name}` has an unreadable source annotation: {source}")]
    Annotation { name: String, source: ParseError },
    #[error("statement name `{0}` occurs twice")]
    DuplicateName(String),
    #[error("missing parent statements: {}", list(.0))]
    DanglingParent(Vec<String>),
    #[error("cyclic inference among: {}", .0.join(", "))]
    Cycle(Vec<String>),
}

fn list(pairs: &[String]) -> String {
    pairs.join(", ")
}

impl DerivationGraph {
    pub fn node(&self, name: &str) -> Option<&Node> {
        self.index.get(name).map(|&i| &self.nodes[i])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn parents(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.1 == i).map(|e| e.0)
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.parents(i).next().is_none()).collect()
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| !self.edges.iter().any(|e| e.0 == i))
            .collect()
    }

    /// Sinks deriving `$false`, or every sink when there are none.
    pub fn conclusions(&self) -> Vec<usize> {
        let sinks = self.sinks();
        let refutations: Vec<usize> = sinks.iter().copied().filter(|&i| self.nodes[i].formula == Formula::False).collect();
        if refutations.is_empty() {
            sinks
        } else {
            refutations
        }
    }

    /// Nodes with a path to `i`, including `i`.
    pub fn ancestors(&self, i: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([i]);
        let mut stack = vec![i];
        while let Some(n) = stack.pop() {
            for p in self.parents(n) {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Input statements read from the problem file that the conclusions
    /// depend on, conjectures excluded.
    pub fn used_inputs(&self) -> Vec<&Node> {
        let mut used = BTreeSet::new();
        for c in self.conclusions() {
            used.extend(self.ancestors(c));
        }
        used.into_iter()
            .map(|i| &self.nodes[i])
            .filter(|n| n.is_input() && n.from_file && !matches!(n.role, Role::Conjecture | Role::NegatedConjecture))
            .collect()
    }

    /// The conjecture the derivation proves, by its original name.
    pub fn conjecture(&self) -> Option<&Node> {
        self.nodes.iter().find(|n| n.role == Role::Conjecture && n.is_input())
    }
}

/// Parses prover output. Lines outside `fof`/`cnf` statements are skipped and
/// counted.
pub fn parse_derivation(text: &str) -> Result<DerivationGraph, DerivationError> {
    let chunks = split_tstp(text);
    let joined = chunks.joined();
    let grammar = crate::syntax::Grammar::tptp();
    let items = Parser::new(&joined, &grammar, ParseOptions { allow_cnf: true }).items()?;
    let statements: Vec<AnnotatedStatement> = items
        .into_iter()
        .filter_map(|i| match i {
            RawItem::Statement(s) => Some(s),
            _ => None,
        })
        .collect();
    from_statements(statements, chunks.skipped)
}

fn from_statements(statements: Vec<AnnotatedStatement>, skipped_lines: usize) -> Result<DerivationGraph, DerivationError> {
    let mut g = DerivationGraph {
        skipped_lines,
        ..Default::default()
    };
    let mut parent_names = Vec::new();
    for s in statements {
        let source = match &s.source {
            Some(text) => Some(parse_annotation(text).map_err(|source| DerivationError::Annotation {
                name: s.name.clone(),
                source,
            })?),
            None => None,
        };
        let src = source.as_ref().and_then(|v| v.first());
        let mut parents = Vec::new();
        let (rule, input_name, from_file) = match src {
            Some(GeneralTerm::App(f, args)) if f == "inference" => {
                let rule = args.first().and_then(GeneralTerm::as_word).unwrap_or("inference").to_owned();
                collect_parents(args, &mut parents);
                (rule, None, false)
            }
            Some(GeneralTerm::App(f, args)) if f == "file" => (INPUT_RULE.to_owned(), args.get(1).and_then(GeneralTerm::as_word).map(str::to_owned), true),
            _ => (INPUT_RULE.to_owned(), None, false),
        };
        if g.index.insert(s.name.clone(), g.nodes.len()).is_some() {
            return Err(DerivationError::DuplicateName(s.name));
        }
        g.nodes.push(Node {
            name: s.name,
            language: s.language,
            role: s.role,
            formula: s.formula,
            rule,
            input_name,
            from_file,
        });
        parent_names.push(parents);
    }
    let mut dangling = BTreeSet::new();
    for (child, parents) in parent_names.iter().enumerate() {
        for p in parents {
            match g.index.get(p) {
                Some(&i) => {
                    g.edges.insert((i, child));
                }
                None => {
                    dangling.insert(p.clone());
                }
            }
        }
    }
    if !dangling.is_empty() {
        return Err(DerivationError::DanglingParent(dangling.into_iter().collect()));
    }
    check_acyclic(&g)?;
    Ok(g)
}

/// Parent names inside an `inference(rule, info, parents)` argument list,
/// descending into nested inferences. `theory(...)` and similar records name
/// no statement.
fn collect_parents(args: &[GeneralTerm], out: &mut Vec<String>) {
    let Some(GeneralTerm::List(items)) = args.get(2) else {
        return;
    };
    for item in items {
        parent_of(item, out);
    }
}

fn parent_of(t: &GeneralTerm, out: &mut Vec<String>) {
    match t {
        GeneralTerm::Word(w) | GeneralTerm::Number(w) => {
            if !out.contains(w) {
                out.push(w.clone());
            }
        }
        GeneralTerm::App(f, args) if f == "inference" => collect_parents(args, out),
        GeneralTerm::Colon(lhs, _) => parent_of(lhs, out),
        _ => {}
    }
}

fn check_acyclic(g: &DerivationGraph) -> Result<(), DerivationError> {
    let n = g.nodes.len();
    let mut indegree = vec![0usize; n];
    let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &g.edges {
        indegree[b] += 1;
        children.entry(a).or_default().push(b);
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut done = 0;
    while let Some(i) = ready.pop() {
        done += 1;
        for &c in children.get(&i).into_iter().flatten() {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    if done == n {
        Ok(())
    } else {
        let names = (0..n).filter(|&i| indegree[i] > 0).map(|i| g.nodes[i].name.clone()).collect();
        Err(DerivationError::Cycle(names))
    }
}
