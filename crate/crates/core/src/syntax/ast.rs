//! Abstract syntax for the FOF subset of TPTP plus TPI instructions.

use std::fmt;
use std::str::FromStr;

/// A first-order term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Variable, name matches `[A-Z][A-Za-z0-9_]*`.
    Var(String),
    /// Function application; zero arguments is a constant.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(functor.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(name)),
        }
    }

    /// Number of symbol occurrences (variables and functors).
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
    /// `<~>`
    Xor,
}

impl Connective {
    pub fn symbol(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Implies => "=>",
            Connective::Iff => "<=>",
            Connective::Xor => "<~>",
        }
    }

    pub fn is_associative(self) -> bool {
        matches!(self, Connective::And | Connective::Or)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn symbol(self) -> &'static str {
        match self {
            Quantifier::Forall => "!",
            Quantifier::Exists => "?",
        }
    }
}

/// A first-order formula.
///
/// `a != b` is `Not(Eq(a, b))`; `a <= b` is parsed as `b => a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    Binary(Connective, Box<Formula>, Box<Formula>),
    Quant(Quantifier, Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(pred.into(), args)
    }

    pub fn prop(pred: impl Into<String>) -> Self {
        Formula::Atom(pred.into(), Vec::new())
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Formula::Eq(lhs, rhs)
    }

    pub fn neq(lhs: Term, rhs: Term) -> Self {
        Formula::not(Formula::Eq(lhs, rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn binary(c: Connective, lhs: Formula, rhs: Formula) -> Self {
        Formula::Binary(c, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::binary(Connective::And, lhs, rhs)
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::binary(Connective::Or, lhs, rhs)
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::binary(Connective::Implies, lhs, rhs)
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::binary(Connective::Iff, lhs, rhs)
    }

    /// Quantifies over `vars`; an empty variable list returns `body` unchanged.
    pub fn quant(q: Quantifier, vars: Vec<String>, body: Formula) -> Self {
        if vars.is_empty() {
            body
        } else {
            Formula::Quant(q, vars, Box::new(body))
        }
    }

    pub fn forall<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Self {
        Formula::quant(Quantifier::Forall, vars.into_iter().map(Into::into).collect(), body)
    }

    pub fn exists<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Self {
        Formula::quant(Quantifier::Exists, vars.into_iter().map(Into::into).collect(), body)
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Self {
        Self::fold(Connective::And, parts).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Self {
        Self::fold(Connective::Or, parts).unwrap_or(Formula::False)
    }

    fn fold(c: Connective, parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(|acc, f| Formula::binary(c, acc, f))
    }

    /// Operands of a maximal `c`-chain, regardless of nesting direction.
    pub fn flatten(&self, c: Connective) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.flatten_into(c, &mut out);
        out
    }

    fn flatten_into<'a>(&'a self, c: Connective, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::Binary(k, l, r) if *k == c => {
                l.flatten_into(c, out);
                r.flatten_into(c, out);
            }
            other => out.push(other),
        }
    }

    /// Splits off a leading run of universal quantifiers.
    pub fn strip_forall(&self) -> (Vec<String>, &Formula) {
        let mut vars = Vec::new();
        let mut f = self;
        while let Formula::Quant(Quantifier::Forall, vs, body) = f {
            vars.extend(vs.iter().cloned());
            f = body;
        }
        (vars, f)
    }
}

/// Statement role.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Axiom,
    Hypothesis,
    Definition,
    Conjecture,
    CheckedDefinition,
    CheckedLemma,
    Plain,
    Lemma,
    NegatedConjecture,
}

impl Role {
    pub const ALL: [Role; 9] = [
        Role::Axiom,
        Role::Hypothesis,
        Role::Definition,
        Role::Conjecture,
        Role::CheckedDefinition,
        Role::CheckedLemma,
        Role::Plain,
        Role::Lemma,
        Role::NegatedConjecture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Hypothesis => "hypothesis",
            Role::Definition => "definition",
            Role::Conjecture => "conjecture",
            Role::CheckedDefinition => "checked_definition",
            Role::CheckedLemma => "checked_lemma",
            Role::Plain => "plain",
            Role::Lemma => "lemma",
            Role::NegatedConjecture => "negated_conjecture",
        }
    }
}

impl FromStr for Role {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Role::ALL.into_iter().find(|r| r.as_str() == s).ok_or(())
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 1-based line/column range in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Language {
    Fof,
    Cnf,
}

impl Language {
    pub fn keyword(self) -> &'static str {
        match self {
            Language::Fof => "fof",
            Language::Cnf => "cnf",
        }
    }
}

/// `fof(name, role, formula[, source]).`
///
/// Equality ignores `span`.
#[derive(Clone, Debug)]
pub struct AnnotatedStatement {
    pub language: Language,
    pub name: String,
    pub role: Role,
    pub formula: Formula,
    /// Annotation text kept verbatim.
    pub source: Option<String>,
    pub span: Option<Span>,
}

impl AnnotatedStatement {
    pub fn new(name: impl Into<String>, role: Role, formula: Formula) -> Self {
        AnnotatedStatement {
            language: Language::Fof,
            name: name.into(),
            role,
            formula,
            source: None,
            span: None,
        }
    }

    pub fn with_role(&self, role: Role) -> Self {
        AnnotatedStatement {
            role,
            ..self.clone()
        }
    }
}

impl PartialEq for AnnotatedStatement {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language
            && self.name == other.name
            && self.role == other.role
            && self.formula == other.formula
            && self.source == other.source
    }
}

impl Eq for AnnotatedStatement {}

/// TPTP general term, used for annotations and TPI payloads.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GeneralTerm {
    /// Lower word, single-quoted word (unquoted content) or `$word`.
    Word(String),
    Var(String),
    Number(String),
    /// `"..."` content.
    Distinct(String),
    App(String, Vec<GeneralTerm>),
    List(Vec<GeneralTerm>),
    Colon(Box<GeneralTerm>, Box<GeneralTerm>),
}

impl GeneralTerm {
    pub fn as_word(&self) -> Option<&str> {
        match self {
            GeneralTerm::Word(w) | GeneralTerm::Number(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TpiVerb {
    AddCases,
    AssumePreviousValid,
    RestrictPremises,
    ExpandDefinitionsIn,
}

impl TpiVerb {
    pub const ALL: [TpiVerb; 4] = [
        TpiVerb::AddCases,
        TpiVerb::AssumePreviousValid,
        TpiVerb::RestrictPremises,
        TpiVerb::ExpandDefinitionsIn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TpiVerb::AddCases => "add_cases",
            TpiVerb::AssumePreviousValid => "assume_previous_valid",
            TpiVerb::RestrictPremises => "restrict_premises",
            TpiVerb::ExpandDefinitionsIn => "expand_definitions_in",
        }
    }

    /// Expected payload shape, for error messages.
    pub fn payload_shape(self) -> &'static str {
        match self {
            TpiVerb::AddCases => "cases_name => target_name",
            TpiVerb::AssumePreviousValid => "any single term, e.g. `all`",
            TpiVerb::RestrictPremises => "lemma_name => [premise, ...]",
            TpiVerb::ExpandDefinitionsIn => "statement_name => [definition, ...]",
        }
    }
}

impl FromStr for TpiVerb {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        TpiVerb::ALL.into_iter().find(|v| v.as_str() == s).ok_or(())
    }
}

impl fmt::Display for TpiVerb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TpiPayload {
    AddCases { cases: String, target: String },
    AssumePreviousValid { scope: GeneralTerm },
    RestrictPremises { lemma: String, premises: Vec<String> },
    ExpandDefinitionsIn { statement: String, definitions: Vec<String> },
}

impl TpiPayload {
    pub fn verb(&self) -> TpiVerb {
        match self {
            TpiPayload::AddCases { .. } => TpiVerb::AddCases,
            TpiPayload::AssumePreviousValid { .. } => TpiVerb::AssumePreviousValid,
            TpiPayload::RestrictPremises { .. } => TpiVerb::RestrictPremises,
            TpiPayload::ExpandDefinitionsIn { .. } => TpiVerb::ExpandDefinitionsIn,
        }
    }

    /// Builds the payload from `lhs [=> rhs]`; `Err` carries a reason.
    pub fn from_parts(
        verb: TpiVerb,
        lhs: GeneralTerm,
        rhs: Option<GeneralTerm>,
    ) -> Result<Self, String> {
        let word = |t: &GeneralTerm| t.as_word().map(str::to_owned);
        let words = |t: &GeneralTerm| match t {
            GeneralTerm::List(items) => items.iter().map(|i| i.as_word().map(str::to_owned)).collect(),
            _ => None,
        };
        let shape_err = || format!("expected `{}`", verb.payload_shape());
        match verb {
            TpiVerb::AddCases => {
                let rhs = rhs.ok_or_else(shape_err)?;
                Ok(TpiPayload::AddCases {
                    cases: word(&lhs).ok_or_else(shape_err)?,
                    target: word(&rhs).ok_or_else(shape_err)?,
                })
            }
            TpiVerb::AssumePreviousValid => match rhs {
                None => Ok(TpiPayload::AssumePreviousValid { scope: lhs }),
                Some(_) => Err(shape_err()),
            },
            TpiVerb::RestrictPremises => {
                let rhs = rhs.ok_or_else(shape_err)?;
                Ok(TpiPayload::RestrictPremises {
                    lemma: word(&lhs).ok_or_else(shape_err)?,
                    premises: words(&rhs).ok_or_else(shape_err)?,
                })
            }
            TpiVerb::ExpandDefinitionsIn => {
                let rhs = rhs.ok_or_else(shape_err)?;
                Ok(TpiPayload::ExpandDefinitionsIn {
                    statement: word(&lhs).ok_or_else(shape_err)?,
                    definitions: words(&rhs).ok_or_else(shape_err)?,
                })
            }
        }
    }
}

/// `tpi(name, verb, payload).`
#[derive(Clone, Debug)]
pub struct TpiInstruction {
    pub name: String,
    pub payload: TpiPayload,
    pub span: Option<Span>,
}

impl TpiInstruction {
    pub fn new(name: impl Into<String>, payload: TpiPayload) -> Self {
        TpiInstruction {
            name: name.into(),
            payload,
            span: None,
        }
    }

    pub fn verb(&self) -> TpiVerb {
        self.payload.verb()
    }
}

impl PartialEq for TpiInstruction {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.payload == other.payload
    }
}

impl Eq for TpiInstruction {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptItem {
    Statement(AnnotatedStatement),
    Tpi(TpiInstruction),
}

impl ScriptItem {
    pub fn name(&self) -> &str {
        match self {
            ScriptItem::Statement(s) => &s.name,
            ScriptItem::Tpi(t) => &t.name,
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            ScriptItem::Statement(s) => s.span,
            ScriptItem::Tpi(t) => t.span,
        }
    }
}

/// Source-ordered statements and instructions with includes spliced in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofScript {
    pub items: Vec<ScriptItem>,
}

impl ProofScript {
    pub fn statements(&self) -> impl Iterator<Item = &AnnotatedStatement> {
        self.items.iter().filter_map(|i| match i {
            ScriptItem::Statement(s) => Some(s),
            ScriptItem::Tpi(_) => None,
        })
    }

    pub fn statement(&self, name: &str) -> Option<&AnnotatedStatement> {
        self.statements().find(|s| s.name == name)
    }
}

/// One top-level item before include resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawItem {
    Statement(AnnotatedStatement),
    Tpi(TpiInstruction),
    Include(String),
}
