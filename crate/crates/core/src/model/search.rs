//! Countermodel search over small finite domains.
//!
//! Instead of enumerating every total interpretation, the search asks for
//! a model in which the formula takes a wanted value and refines a partial
//! model only at the table entries the formula actually inspects. A branch
//! that settles all obligations with defined entries stays settled in every
//! completion, so the first success can be completed arbitrarily.

use std::ops::ControlFlow;
use std::rc::Rc;

use super::PartialModel;
use crate::formula_ops::{formula_symbols, free_variables, Symbol, SymbolKind};
use crate::syntax::{Connective, Formula, Quantifier, Term};

pub const DEFAULT_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("model search exceeded its budget of {budget} steps at domain size {size}")]
pub struct BudgetExceeded {
    pub budget: u64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    /// True in every total model with 1..=n elements.
    ValidUpTo(usize),
    Countermodel(PartialModel),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::ValidUpTo(_))
    }
}

/// Looks for a total model falsifying the universal closure of `f`, for
/// domain sizes 1 to `max_domain` in turn.
pub fn brute_force_validity(f: &Formula, max_domain: usize) -> Result<Validity, BudgetExceeded> {
    brute_force_validity_with_budget(f, max_domain, DEFAULT_BUDGET)
}

pub fn brute_force_validity_with_budget(f: &Formula, max_domain: usize, budget: u64) -> Result<Validity, BudgetExceeded> {
    let closed = Formula::forall(free_variables(f), f.clone());
    for n in 1..=max_domain {
        if let Some(m) = solve(&[(&closed, false)], n, budget)? {
            return Ok(Validity::Countermodel(m));
        }
    }
    Ok(Validity::ValidUpTo(max_domain))
}

/// A total model of size `size` satisfying the closures of all `formulas`.
pub fn find_model(formulas: &[Formula], size: usize, budget: u64) -> Result<Option<PartialModel>, BudgetExceeded> {
    let closed: Vec<Formula> = formulas
        .iter()
        .map(|f| Formula::forall(free_variables(f), f.clone()))
        .collect();
    let goals: Vec<(&Formula, bool)> = closed.iter().map(|f| (f, true)).collect();
    solve(&goals, size, budget)
}

fn solve(goals: &[(&Formula, bool)], size: usize, budget: u64) -> Result<Option<PartialModel>, BudgetExceeded> {
    let mut s = Search {
        model: PartialModel::numbered(size),
        trail: Vec::new(),
        steps: 0,
        budget,
    };
    let mut agenda: Agenda = None;
    for (f, want) in goals.iter().rev() {
        agenda = push(&agenda, Goal { f, env: Vec::new(), want: *want });
    }
    if !s.solve(agenda)? {
        return Ok(None);
    }
    let mut m = s.model;
    let mut signature = std::collections::BTreeSet::new();
    for (f, _) in goals {
        signature.extend(formula_symbols(f));
    }
    complete(&mut m, &signature);
    Ok(Some(m))
}

/// Fills undefined entries of `signature` with the first element or false.
fn complete<'a>(m: &mut PartialModel, signature: impl IntoIterator<Item = &'a Symbol>) {
    let n = m.size();
    for sym in signature {
        for args in tuples(n, sym.arity) {
            match sym.kind {
                SymbolKind::Function if m.function(&sym.name, &args).is_none() => {
                    m.set_function(&sym.name, &args, 0).expect("arity is consistent")
                }
                SymbolKind::Predicate if m.predicate(&sym.name, &args).is_none() => {
                    m.set_predicate(&sym.name, &args, false).expect("arity is consistent")
                }
                _ => {}
            }
        }
    }
}

fn tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

type Env<'f> = Vec<(&'f str, usize)>;

struct Goal<'f> {
    f: &'f Formula,
    env: Env<'f>,
    want: bool,
}

struct Node<'f> {
    goal: Goal<'f>,
    next: Agenda<'f>,
}

type Agenda<'f> = Option<Rc<Node<'f>>>;

fn push<'f>(rest: &Agenda<'f>, goal: Goal<'f>) -> Agenda<'f> {
    Some(Rc::new(Node {
        goal,
        next: rest.clone(),
    }))
}

enum Entry {
    Fun(String, Vec<usize>),
    Pred(String, Vec<usize>),
}

struct Search {
    model: PartialModel,
    trail: Vec<Entry>,
    steps: u64,
    budget: u64,
}

type Cont<'a> = dyn FnMut(&mut Search, &[usize]) -> Result<bool, BudgetExceeded> + 'a;

impl Search {
    fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(BudgetExceeded {
                budget: self.budget,
                size: self.model.size(),
            });
        }
        Ok(())
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("len > mark") {
                Entry::Fun(n, a) => self.model.unset_function(&n, &a),
                Entry::Pred(n, a) => self.model.unset_predicate(&n, &a),
            }
        }
    }

    fn solve(&mut self, agenda: Agenda<'_>) -> Result<bool, BudgetExceeded> {
        self.tick()?;
        let Some(node) = agenda else {
            return Ok(true);
        };
        let Goal { f, env, want } = &node.goal;
        let (want, rest) = (*want, &node.next);
        match f {
            Formula::True => if want { self.solve(rest.clone()) } else { Ok(false) },
            Formula::False => if want { Ok(false) } else { self.solve(rest.clone()) },
            Formula::Not(g) => self.solve(push(rest, Goal { f: g, env: env.clone(), want: !want })),
            Formula::Binary(c, l, r) => {
                let (l, r): (&Formula, &Formula) = (l, r);
                let alts: Vec<Vec<(&Formula, bool)>> = match (c, want) {
                    (Connective::And, true) => vec![vec![(l, true), (r, true)]],
                    (Connective::And, false) => vec![vec![(l, false)], vec![(r, false)]],
                    (Connective::Or, true) => vec![vec![(l, true)], vec![(r, true)]],
                    (Connective::Or, false) => vec![vec![(l, false), (r, false)]],
                    (Connective::Implies, true) => vec![vec![(l, false)], vec![(r, true)]],
                    (Connective::Implies, false) => vec![vec![(l, true), (r, false)]],
                    (Connective::Iff, true) | (Connective::Xor, false) => {
                        vec![vec![(l, true), (r, true)], vec![(l, false), (r, false)]]
                    }
                    (Connective::Iff, false) | (Connective::Xor, true) => {
                        vec![vec![(l, true), (r, false)], vec![(l, false), (r, true)]]
                    }
                };
                for alt in alts {
                    let mut agenda = rest.clone();
                    for (g, w) in alt.into_iter().rev() {
                        agenda = push(&agenda, Goal { f: g, env: env.clone(), want: w });
                    }
                    let mark = self.trail.len();
                    if self.solve(agenda)? {
                        return Ok(true);
                    }
                    self.undo(mark);
                }
                Ok(false)
            }
            Formula::Quant(q, vs, body) => {
                let every = (*q == Quantifier::Forall) == want;
                let instances = tuples(self.model.size(), vs.len());
                let bind = |t: &[usize]| {
                    let mut e = env.clone();
                    e.extend(vs.iter().map(String::as_str).zip(t.iter().copied()));
                    e
                };
                if every {
                    let mut agenda = rest.clone();
                    for t in instances.iter().rev() {
                        agenda = push(&agenda, Goal { f: body, env: bind(t), want });
                    }
                    return self.solve(agenda);
                }
                for t in &instances {
                    let mark = self.trail.len();
                    if self.solve(push(rest, Goal { f: body, env: bind(t), want }))? {
                        return Ok(true);
                    }
                    self.undo(mark);
                }
                Ok(false)
            }
            Formula::Atom(p, args) => self.with_terms(args, env, &mut |s, vals| match s.model.predicate(p, vals) {
                Some(v) if v == want => s.solve(rest.clone()),
                Some(_) => Ok(false),
                None => {
                    let mark = s.trail.len();
                    s.model.set_predicate(p, vals, want).expect("arity is consistent");
                    s.trail.push(Entry::Pred(p.clone(), vals.to_vec()));
                    let ok = s.solve(rest.clone())?;
                    if !ok {
                        s.undo(mark);
                    }
                    Ok(ok)
                }
            }),
            Formula::Eq(l, r) => {
                let pair = [l.clone(), r.clone()];
                self.with_terms(&pair, env, &mut |s, vals| {
                    if (vals[0] == vals[1]) == want {
                        s.solve(rest.clone())
                    } else {
                        Ok(false)
                    }
                })
            }
        }
    }

    /// Evaluates `ts`, branching over values for undefined function entries.
    fn with_terms(&mut self, ts: &[Term], env: &Env<'_>, k: &mut Cont<'_>) -> Result<bool, BudgetExceeded> {
        let mut vals = Vec::with_capacity(ts.len());
        let mut missing = None;
        for t in ts {
            match self.term(t, env) {
                Ok(v) => vals.push(v),
                Err(m) => {
                    missing = Some(m);
                    break;
                }
            }
        }
        let Some((name, args)) = missing else {
            return k(self, &vals);
        };
        for v in 0..self.model.size() {
            self.tick()?;
            let mark = self.trail.len();
            self.model.set_function(&name, &args, v).expect("arity is consistent");
            self.trail.push(Entry::Fun(name.clone(), args.clone()));
            if self.with_terms(ts, env, k)? {
                return Ok(true);
            }
            self.undo(mark);
        }
        Ok(false)
    }

    fn term(&self, t: &Term, env: &Env<'_>) -> Result<usize, (String, Vec<usize>)> {
        match t {
            Term::Var(v) => Ok(env
                .iter()
                .rev()
                .find(|(k, _)| k == v)
                .map(|(_, e)| *e)
                .expect("formulas are closed")),
            Term::App(f, args) => {
                let vals = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                self.model.function(f, &vals).ok_or((f.clone(), vals))
            }
        }
    }
}

/// Classical satisfaction on a total model. Panics on an undefined entry.
pub fn satisfies(f: &Formula, m: &PartialModel, env: &mut Vec<(String, usize)>) -> bool {
    fn term(t: &Term, m: &PartialModel, env: &[(String, usize)]) -> usize {
        match t {
            Term::Var(v) => env.iter().rev().find(|(k, _)| k == v).expect("bound variable").1,
            Term::App(f, args) => {
                let vals: Vec<usize> = args.iter().map(|a| term(a, m, env)).collect();
                m.function(f, &vals).unwrap_or_else(|| panic!("{f} undefined; model is not total"))
            }
        }
    }
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p, args) => {
            let vals: Vec<usize> = args.iter().map(|a| term(a, m, env)).collect();
            m.predicate(p, &vals).unwrap_or_else(|| panic!("{p} undefined; model is not total"))
        }
        Formula::Eq(l, r) => term(l, m, env) == term(r, m, env),
        Formula::Not(g) => !satisfies(g, m, env),
        Formula::Binary(c, l, r) => {
            let a = satisfies(l, m, env);
            let b = satisfies(r, m, env);
            match c {
                Connective::And => a && b,
                Connective::Or => a || b,
                Connective::Implies => !a || b,
                Connective::Iff => a == b,
                Connective::Xor => a != b,
            }
        }
        Formula::Quant(q, vs, body) => {
            let base = env.len();
            let mut result = *q == Quantifier::Forall;
            for t in tuples(m.size(), vs.len()) {
                env.truncate(base);
                env.extend(vs.iter().cloned().zip(t));
                let v = satisfies(body, m, env);
                if v != result {
                    result = v;
                    break;
                }
            }
            env.truncate(base);
            result
        }
    }
}

/// Visits every total model of `signature` over `d1..dn`. Fails without
/// visiting anything when the model count exceeds `budget`.
pub fn enumerate_models(
    signature: &[Symbol],
    n: usize,
    budget: u64,
    mut visit: impl FnMut(&PartialModel) -> ControlFlow<()>,
) -> Result<(), BudgetExceeded> {
    let slots: Vec<(&Symbol, Vec<usize>)> = signature
        .iter()
        .flat_map(|s| tuples(n, s.arity).into_iter().map(move |t| (s, t)))
        .collect();
    let radix = |s: &Symbol| match s.kind {
        SymbolKind::Function => n as u64,
        SymbolKind::Predicate => 2,
    };
    let mut total: u64 = 1;
    for (s, _) in &slots {
        total = total.saturating_mul(radix(s));
    }
    if total > budget {
        return Err(BudgetExceeded { budget, size: n });
    }
    let mut digits = vec![0u64; slots.len()];
    loop {
        let mut m = PartialModel::numbered(n);
        for ((s, args), d) in slots.iter().zip(&digits) {
            match s.kind {
                SymbolKind::Function => m.set_function(&s.name, args, *d as usize),
                SymbolKind::Predicate => m.set_predicate(&s.name, args, *d == 1),
            }
            .expect("arity is consistent");
        }
        if visit(&m).is_break() {
            return Ok(());
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(());
            }
            digits[i] += 1;
            if digits[i] < radix(slots[i].0) {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
