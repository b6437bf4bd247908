use std::collections::BTreeSet;
use std::fmt;

use super::vars::{formula_symbols, free_variables, substitute_term, term_variables, Subst};
use crate::syntax::{Connective, Formula, Quantifier, Term};

/// Signed atom. Equality is the predicate `=` with two arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub pred: String,
    pub args: Vec<Term>,
}

pub const EQUALITY: &str = "=";

impl Literal {
    pub fn new(positive: bool, pred: impl Into<String>, args: Vec<Term>) -> Self {
        Literal {
            positive,
            pred: pred.into(),
            args,
        }
    }

    pub fn is_equality(&self) -> bool {
        self.pred == EQUALITY
    }

    pub fn negated(&self) -> Self {
        Literal {
            positive: !self.positive,
            ..self.clone()
        }
    }

    pub fn to_formula(&self) -> Formula {
        let atom = if self.is_equality() {
            Formula::Eq(self.args[0].clone(), self.args[1].clone())
        } else {
            Formula::Atom(self.pred.clone(), self.args.clone())
        };
        if self.positive {
            atom
        } else {
            Formula::not(atom)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Disjunction of literals, implicitly universally closed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        Clause { literals }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for l in &self.literals {
            l.args.iter().for_each(|a| term_variables(a, &mut out));
        }
        out
    }

    pub fn to_formula(&self) -> Formula {
        let body = Formula::disj(self.literals.iter().map(Literal::to_formula));
        Formula::forall(self.variables(), body)
    }

    /// `cnf(name, role, ...)` line.
    pub fn to_cnf(&self, name: &str, role: &str) -> String {
        format!("cnf({name}, {role}, {self}).")
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("$false");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Converts the conjunction of `formulas` (free variables read universally)
/// into an equisatisfiable clause set.
pub fn clausify(formulas: &[Formula]) -> Vec<Clause> {
    let mut used: BTreeSet<String> = BTreeSet::new();
    for f in formulas {
        used.extend(formula_symbols(f).into_iter().map(|s| s.name));
    }
    let mut cx = Context {
        used,
        next_var: 0,
        next_skolem: 0,
    };
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for f in formulas {
        let closed = Formula::forall(free_variables(f), f.clone());
        let nnf = simplify(nnf(&closed, true));
        let qfree = cx.skolemize(&nnf, &mut Subst::new(), &mut Vec::new());
        for lits in cnf(&qfree) {
            if let Some(clause) = cx.finish(lits) {
                if seen.insert(clause.clone()) {
                    out.push(clause);
                }
            }
        }
    }
    out
}

fn nnf(f: &Formula, pos: bool) -> Formula {
    use Connective::*;
    let lit = |g: &Formula| if pos { g.clone() } else { Formula::not(g.clone()) };
    match f {
        Formula::True => if pos { Formula::True } else { Formula::False },
        Formula::False => if pos { Formula::False } else { Formula::True },
        Formula::Atom(..) | Formula::Eq(..) => lit(f),
        Formula::Not(g) => nnf(g, !pos),
        Formula::Binary(c, l, r) => match (c, pos) {
            (And, true) | (Or, false) => Formula::and(nnf(l, pos), nnf(r, pos)),
            (Or, true) | (And, false) => Formula::or(nnf(l, pos), nnf(r, pos)),
            (Implies, true) => Formula::or(nnf(l, false), nnf(r, true)),
            (Implies, false) => Formula::and(nnf(l, true), nnf(r, false)),
            (Iff, true) | (Xor, false) => Formula::and(
                Formula::or(nnf(l, false), nnf(r, true)),
                Formula::or(nnf(l, true), nnf(r, false)),
            ),
            (Iff, false) | (Xor, true) => Formula::and(
                Formula::or(nnf(l, true), nnf(r, true)),
                Formula::or(nnf(l, false), nnf(r, false)),
            ),
        },
        Formula::Quant(q, vs, body) => {
            let q = match (q, pos) {
                (Quantifier::Forall, true) | (Quantifier::Exists, false) => Quantifier::Forall,
                _ => Quantifier::Exists,
            };
            Formula::Quant(q, vs.clone(), Box::new(nnf(body, pos)))
        }
    }
}

/// Folds `$true`/`$false` out of an NNF formula.
fn simplify(f: Formula) -> Formula {
    match f {
        Formula::Binary(c, l, r) => {
            let (l, r) = (simplify(*l), simplify(*r));
            match (c, &l, &r) {
                (Connective::And, Formula::False, _) | (Connective::And, _, Formula::False) => Formula::False,
                (Connective::Or, Formula::True, _) | (Connective::Or, _, Formula::True) => Formula::True,
                (Connective::And, Formula::True, _) | (Connective::Or, Formula::False, _) => r,
                (Connective::And, _, Formula::True) | (Connective::Or, _, Formula::False) => l,
                _ => Formula::binary(c, l, r),
            }
        }
        Formula::Quant(q, vs, body) => match simplify(*body) {
            b @ (Formula::True | Formula::False) => b,
            b => Formula::Quant(q, vs, Box::new(b)),
        },
        other => other,
    }
}

struct Context {
    used: BTreeSet<String>,
    next_var: usize,
    next_skolem: usize,
}

impl Context {
    fn fresh_var(&mut self) -> String {
        self.next_var += 1;
        format!("X{}", self.next_var)
    }

    fn fresh_skolem(&mut self) -> String {
        loop {
            self.next_skolem += 1;
            let name = format!("sk_{}", self.next_skolem);
            if !self.used.contains(&name) {
                return name;
            }
        }
    }

    /// Drops quantifiers: universals become fresh variables, existentials
    /// Skolem terms over the enclosing universals that occur free.
    fn skolemize(&mut self, f: &Formula, env: &mut Subst, universals: &mut Vec<String>) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| substitute_term(a, env)).collect()),
            Formula::Eq(l, r) => Formula::Eq(substitute_term(l, env), substitute_term(r, env)),
            Formula::Not(g) => Formula::not(self.skolemize(g, env, universals)),
            Formula::Binary(c, l, r) => {
                let l = self.skolemize(l, env, universals);
                let r = self.skolemize(r, env, universals);
                Formula::binary(*c, l, r)
            }
            Formula::Quant(q, vs, body) => {
                let saved: Vec<(String, Option<Term>)> = vs.iter().map(|v| (v.clone(), env.get(v).cloned())).collect();
                let depth = universals.len();
                match q {
                    Quantifier::Forall => {
                        for v in vs {
                            let fresh = self.fresh_var();
                            env.insert(v.clone(), Term::Var(fresh.clone()));
                            universals.push(fresh);
                        }
                    }
                    Quantifier::Exists => {
                        let mut live = BTreeSet::new();
                        for w in free_variables(f) {
                            if let Some(t) = env.get(&w) {
                                term_variables(t, &mut live);
                            }
                        }
                        let args: Vec<Term> = universals.iter().filter(|u| live.contains(*u)).map(|u| Term::Var(u.clone())).collect();
                        for v in vs {
                            let sk = self.fresh_skolem();
                            env.insert(v.clone(), Term::App(sk, args.clone()));
                        }
                    }
                }
                let out = self.skolemize(body, env, universals);
                universals.truncate(depth);
                for (v, old) in saved {
                    match old {
                        Some(t) => env.insert(v, t),
                        None => env.remove(&v),
                    };
                }
                out
            }
        }
    }

    /// Dedups literals, drops tautologies, renames variables apart.
    fn finish(&mut self, lits: Vec<Literal>) -> Option<Clause> {
        let mut out: Vec<Literal> = Vec::with_capacity(lits.len());
        for l in lits {
            if out.iter().any(|m| m.pred == l.pred && m.args == l.args && m.positive != l.positive) {
                return None;
            }
            if l.is_equality() && l.positive && l.args[0] == l.args[1] {
                return None;
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out.retain(|l| !(l.is_equality() && !l.positive && l.args[0] == l.args[1]));
        let mut renaming = Subst::new();
        for l in &out {
            let mut vs = Vec::new();
            l.args.iter().for_each(|a| ordered_vars(a, &mut vs));
            for v in vs {
                if !renaming.contains_key(&v) {
                    let fresh = self.fresh_var();
                    renaming.insert(v, Term::Var(fresh));
                }
            }
        }
        Some(Clause::new(
            out.into_iter()
                .map(|l| Literal {
                    args: l.args.iter().map(|a| substitute_term(a, &renaming)).collect(),
                    ..l
                })
                .collect(),
        ))
    }
}

fn ordered_vars(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(v) if !out.contains(v) => out.push(v.clone()),
        Term::Var(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| ordered_vars(a, out)),
    }
}

fn literal(f: &Formula) -> Literal {
    match f {
        Formula::Atom(p, args) => Literal::new(true, p.clone(), args.clone()),
        Formula::Eq(l, r) => Literal::new(true, EQUALITY, vec![l.clone(), r.clone()]),
        Formula::Not(g) => literal(g).negated(),
        other => unreachable!("not a literal: {other}"),
    }
}

/// Distributes a quantifier-free NNF formula into clauses.
fn cnf(f: &Formula) -> Vec<Vec<Literal>> {
    match f {
        Formula::True => vec![],
        Formula::False => vec![vec![]],
        Formula::Binary(Connective::And, l, r) => {
            let mut out = cnf(l);
            out.extend(cnf(r));
            out
        }
        Formula::Binary(Connective::Or, l, r) => {
            let (ls, rs) = (cnf(l), cnf(r));
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for a in &ls {
                for b in &rs {
                    let mut c = a.clone();
                    c.extend(b.iter().cloned());
                    out.push(c);
                }
            }
            out
        }
        lit => vec![vec![literal(lit)]],
    }
}
