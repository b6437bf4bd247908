use std::collections::BTreeMap;
use std::ops::{BitAnd, BitOr, Not};

use super::PartialModel;
use crate::formula_ops::free_variables;
use crate::syntax::{Connective, Formula, ProofScript, Quantifier, Role, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TruthValue {
    True,
    False,
    Unknown,
}

impl std::fmt::Display for TruthValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Unknown => "unknown",
        })
    }
}

impl TruthValue {
    pub fn implies(self, other: Self) -> Self {
        !self | other
    }

    pub fn iff(self, other: Self) -> Self {
        (self & other) | (!self & !other)
    }

    pub fn known(self) -> Option<bool> {
        match self {
            TruthValue::True => Some(true),
            TruthValue::False => Some(false),
            TruthValue::Unknown => None,
        }
    }
}

impl From<bool> for TruthValue {
    fn from(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }
}

impl Not for TruthValue {
    type Output = Self;
    fn not(self) -> Self {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            TruthValue::Unknown => TruthValue::Unknown,
        }
    }
}

impl BitAnd for TruthValue {
    type Output = Self;
    fn bitand(self, rhs: Self) -> Self {
        use TruthValue::*;
        match (self, rhs) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }
}

impl BitOr for TruthValue {
    type Output = Self;
    fn bitor(self, rhs: Self) -> Self {
        !(!self & !rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable {0} is not bound")]
    UnboundVariable(String),
}

/// Strong Kleene value of `f` under `env` (variable name to element index).
pub fn evaluate(f: &Formula, m: &PartialModel, env: &BTreeMap<String, usize>) -> Result<TruthValue, EvalError> {
    if let Some(v) = free_variables(f).into_iter().find(|v| !env.contains_key(v)) {
        return Err(EvalError::UnboundVariable(v));
    }
    let mut stack: Vec<(String, usize)> = env.iter().map(|(k, v)| (k.clone(), *v)).collect();
    Ok(Evaluator { m }.formula(f, &mut stack))
}

/// Value of the universal closure of `f`.
pub fn evaluate_closed(f: &Formula, m: &PartialModel) -> TruthValue {
    let closed = Formula::forall(free_variables(f), f.clone());
    Evaluator { m }.formula(&closed, &mut Vec::new())
}

struct Evaluator<'m> {
    m: &'m PartialModel,
}

fn lookup(env: &[(String, usize)], v: &str) -> usize {
    env.iter().rev().find(|(k, _)| k == v).map(|(_, e)| *e).expect("checked by caller")
}

impl Evaluator<'_> {
    fn term(&self, t: &Term, env: &[(String, usize)]) -> Option<usize> {
        match t {
            Term::Var(v) => Some(lookup(env, v)),
            Term::App(f, args) => {
                let vals = args.iter().map(|a| self.term(a, env)).collect::<Option<Vec<_>>>()?;
                self.m.function(f, &vals)
            }
        }
    }

    fn formula(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> TruthValue {
        use TruthValue::*;
        match f {
            Formula::True => True,
            Formula::False => False,
            Formula::Atom(p, args) => args
                .iter()
                .map(|a| self.term(a, env))
                .collect::<Option<Vec<_>>>()
                .and_then(|vals| self.m.predicate(p, &vals))
                .map_or(Unknown, TruthValue::from),
            Formula::Eq(l, r) => match (self.term(l, env), self.term(r, env)) {
                (Some(a), Some(b)) => (a == b).into(),
                _ => Unknown,
            },
            Formula::Not(g) => !self.formula(g, env),
            Formula::Binary(c, l, r) => {
                let a = self.formula(l, env);
                match (c, a) {
                    (Connective::And, False) => return False,
                    (Connective::Or, True) => return True,
                    (Connective::Implies, False) => return True,
                    _ => {}
                }
                let b = self.formula(r, env);
                match c {
                    Connective::And => a & b,
                    Connective::Or => a | b,
                    Connective::Implies => a.implies(b),
                    Connective::Iff => a.iff(b),
                    Connective::Xor => !a.iff(b),
                }
            }
            Formula::Quant(q, vs, body) => {
                let (unit, absorbing) = match q {
                    Quantifier::Forall => (True, False),
                    Quantifier::Exists => (False, True),
                };
                let base = env.len();
                env.extend(vs.iter().map(|v| (v.clone(), 0)));
                let mut acc = unit;
                let n = self.m.size();
                let mut tuple = vec![0usize; vs.len()];
                'outer: loop {
                    for (i, e) in tuple.iter().enumerate() {
                        env[base + i].1 = *e;
                    }
                    let v = self.formula(body, env);
                    if v == absorbing {
                        acc = absorbing;
                        break;
                    }
                    if v == Unknown {
                        acc = Unknown;
                    }
                    // odometer increment
                    for i in (0..tuple.len()).rev() {
                        tuple[i] += 1;
                        if tuple[i] < n {
                            continue 'outer;
                        }
                        tuple[i] = 0;
                    }
                    break;
                }
                if n == 0 {
                    acc = unit;
                }
                env.truncate(base);
                acc
            }
        }
    }
}

/// Statement names bucketed by the value of their universal closure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub true_: Vec<String>,
    pub false_: Vec<String>,
    pub unknown: Vec<String>,
}

impl AxiomReport {
    pub fn validates(&self) -> bool {
        self.false_.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.true_.is_empty() && self.false_.is_empty() && self.unknown.is_empty()
    }
}

/// Evaluates every axiom-like statement and checked definition of `script` on `m`.
pub fn check_axioms(script: &ProofScript, m: &PartialModel) -> AxiomReport {
    bucket(script, |f| evaluate_closed(f, m))
}

/// Value of `f`'s universal closure when each top-level universal variable
/// ranges over `range(var)`, or the whole domain when that is `None`.
/// Inner quantifiers always range over the whole domain.
pub fn evaluate_relativized(f: &Formula, m: &PartialModel, range: &dyn Fn(&str) -> Option<Vec<usize>>) -> TruthValue {
    let closed = Formula::forall(free_variables(f), f.clone());
    let (vars, body) = closed.strip_forall();
    let all: Vec<usize> = (0..m.size()).collect();
    let ranges: Vec<Vec<usize>> = vars.iter().map(|v| range(v).unwrap_or_else(|| all.clone())).collect();
    let ev = Evaluator { m };
    let mut env: Vec<(String, usize)> = vars.iter().map(|v| (v.clone(), 0)).collect();
    let mut acc = TruthValue::True;
    let mut pick = vec![0usize; vars.len()];
    if ranges.iter().any(Vec::is_empty) {
        return acc;
    }
    'outer: loop {
        for (i, &k) in pick.iter().enumerate() {
            env[i].1 = ranges[i][k];
        }
        match ev.formula(body, &mut env) {
            TruthValue::False => return TruthValue::False,
            TruthValue::Unknown => acc = TruthValue::Unknown,
            TruthValue::True => {}
        }
        for i in (0..pick.len()).rev() {
            pick[i] += 1;
            if pick[i] < ranges[i].len() {
                continue 'outer;
            }
            pick[i] = 0;
        }
        return acc;
    }
}

/// [`check_axioms`] with top-level variables restricted as in
/// [`evaluate_relativized`].
pub fn check_axioms_relativized(script: &ProofScript, m: &PartialModel, range: &dyn Fn(&str) -> Option<Vec<usize>>) -> AxiomReport {
    bucket(script, |f| evaluate_relativized(f, m, range))
}

fn bucket(script: &ProofScript, mut value: impl FnMut(&Formula) -> TruthValue) -> AxiomReport {
    let mut report = AxiomReport::default();
    for s in script.statements() {
        if !matches!(s.role, Role::Axiom | Role::Hypothesis | Role::Definition | Role::CheckedDefinition) {
            continue;
        }
        let bucket = match value(&s.formula) {
            TruthValue::True => &mut report.true_,
            TruthValue::False => &mut report.false_,
            TruthValue::Unknown => &mut report.unknown,
        };
        bucket.push(s.name.clone());
    }
    report
}
