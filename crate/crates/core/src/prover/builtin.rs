//! Given-clause resolution with factoring, forward subsumption and
//! equality by axioms.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use super::unify::unify_args;
use super::{Problem, Status, Verdict};
use crate::formula_ops::{clausify, formula_symbols, substitute_term, Clause, Literal, Subst, SymbolKind, EQUALITY};
use crate::syntax::{Formula, Term};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    /// Clauses kept (input plus derived) before giving up with Unknown.
    pub max_clauses: usize,
    /// Wall-clock budget before giving up with Timeout.
    pub max_seconds: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_clauses: 20_000,
            max_seconds: 10.0,
        }
    }
}

/// Proves `conjecture` from `premises` by refuting premises plus its negation.
pub fn builtin_prove(premises: &[Formula], conjecture: &Formula, limits: &Limits) -> Verdict {
    let named: Vec<(String, Formula)> = premises
        .iter()
        .enumerate()
        .map(|(i, f)| (format!("premise_{}", i + 1), f.clone()))
        .collect();
    prove_named(&named, ("goal", conjecture), limits)
}

pub fn builtin_prove_problem(problem: &Problem<'_>, limits: &Limits) -> Verdict {
    let named: Vec<(String, Formula)> = problem.premises.iter().map(|s| (s.name.clone(), s.formula.clone())).collect();
    prove_named(&named, (problem.conjecture.name.as_str(), &problem.conjecture.formula), limits)
}

#[derive(Clone, Debug)]
enum Origin {
    /// Index into the statement list.
    Input(usize),
    EqualityAxiom,
    Resolution(usize, usize),
    Factor(usize),
}

struct Record {
    clause: Clause,
    origin: Origin,
}

struct Statement {
    name: String,
    formula: Formula,
    negated_conjecture: bool,
}

fn prove_named(premises: &[(String, Formula)], conjecture: (&str, &Formula), limits: &Limits) -> Verdict {
    let start = Instant::now();
    let mut statements: Vec<Statement> = premises
        .iter()
        .map(|(n, f)| Statement {
            name: n.clone(),
            formula: f.clone(),
            negated_conjecture: false,
        })
        .collect();
    statements.push(Statement {
        name: conjecture.0.to_owned(),
        formula: conjecture.1.clone(),
        negated_conjecture: true,
    });
    let mut inputs = Vec::new();
    for (i, s) in statements.iter().enumerate() {
        let input = if s.negated_conjecture {
            let closed = Formula::forall(crate::formula_ops::free_variables(&s.formula), s.formula.clone());
            Formula::not(closed)
        } else {
            s.formula.clone()
        };
        for c in clausify(std::slice::from_ref(&input)) {
            inputs.push((c, Origin::Input(i)));
        }
    }
    let axioms = equality_axioms(inputs.iter().map(|(c, _)| c));
    // Treating `=` as an uninterpreted predicate is sound, and usually far
    // cheaper; only a failed quick pass pays for the equality axioms.
    let mut quick = None;
    if !axioms.is_empty() {
        let budget = Limits {
            max_seconds: limits.max_seconds * QUICK_SHARE,
            ..*limits
        };
        let mut prover = Saturation::with_inputs(&inputs, &[]);
        let outcome = prover.run(&budget, start);
        if let Outcome::Proof(_) = outcome {
            quick = Some((prover, outcome));
        }
    }
    let (prover, outcome) = quick.unwrap_or_else(|| {
        let mut prover = Saturation::with_inputs(&inputs, &axioms);
        let outcome = prover.run(limits, start);
        (prover, outcome)
    });
    let mut v = Verdict::new(outcome.status());
    if let Outcome::Proof(empty) = outcome {
        let ancestors = prover.ancestors(empty);
        let used: BTreeSet<usize> = ancestors
            .iter()
            .filter_map(|&id| match prover.records[id].origin {
                Origin::Input(i) => Some(i),
                _ => None,
            })
            .collect();
        v.used_premises = used
            .iter()
            .filter(|&&i| !statements[i].negated_conjecture)
            .map(|&i| statements[i].name.clone())
            .collect();
        v.derivation_text = Some(prover.tstp(&statements, &used, &ancestors));
        v.szs_word = Some("Theorem".into());
    } else if let Outcome::Saturated = outcome {
        v.szs_word = Some("CounterSatisfiable".into());
    }
    v.note = Some(format!("{} clauses", prover.records.len()));
    v.wall_seconds = start.elapsed().as_secs_f64();
    v
}

/// Reflexivity, symmetry, transitivity and per-position congruence, when `=` occurs.
fn equality_axioms<'c>(clauses: impl Iterator<Item = &'c Clause>) -> Vec<Clause> {
    let mut uses_eq = false;
    let mut preds = BTreeSet::new();
    let mut funs = BTreeSet::new();
    for c in clauses {
        for l in &c.literals {
            if l.is_equality() {
                uses_eq = true;
            } else {
                preds.insert((l.pred.clone(), l.args.len()));
            }
            let f = Formula::Atom("x".into(), l.args.clone());
            for s in formula_symbols(&f) {
                if s.kind == SymbolKind::Function && s.arity > 0 {
                    funs.insert((s.name, s.arity));
                }
            }
        }
    }
    if !uses_eq {
        return Vec::new();
    }
    let v = |s: &str| Term::var(s);
    let eq = |pos: bool, a: Term, b: Term| Literal::new(pos, EQUALITY, vec![a, b]);
    let mut out = vec![
        Clause::new(vec![eq(true, v("X"), v("X"))]),
        Clause::new(vec![eq(false, v("X"), v("Y")), eq(true, v("Y"), v("X"))]),
        Clause::new(vec![eq(false, v("X"), v("Y")), eq(false, v("Y"), v("Z")), eq(true, v("X"), v("Z"))]),
    ];
    let args = |n: usize, i: usize, at: &str| -> Vec<Term> {
        (0..n).map(|j| if j == i { v(at) } else { v(&format!("A{j}")) }).collect()
    };
    for (f, n) in funs {
        for i in 0..n {
            out.push(Clause::new(vec![
                eq(false, v("X"), v("Y")),
                eq(true, Term::app(f.clone(), args(n, i, "X")), Term::app(f.clone(), args(n, i, "Y"))),
            ]));
        }
    }
    for (p, n) in preds {
        for i in 0..n {
            out.push(Clause::new(vec![
                eq(false, v("X"), v("Y")),
                Literal::new(false, p.clone(), args(n, i, "X")),
                Literal::new(true, p.clone(), args(n, i, "Y")),
            ]));
        }
    }
    out
}

enum Outcome {
    Proof(usize),
    Saturated,
    ClauseLimit,
    TimeLimit,
}

impl Outcome {
    fn status(&self) -> Status {
        match self {
            Outcome::Proof(_) => Status::Proved,
            Outcome::Saturated => Status::Refuted,
            Outcome::ClauseLimit => Status::Unknown,
            Outcome::TimeLimit => Status::Timeout,
        }
    }
}

const AGE_RATIO: usize = 5;

#[derive(Default)]
struct Saturation {
    records: Vec<Record>,
    /// Canonical forms of every kept clause.
    seen: HashSet<Clause>,
    /// Keyed by (symbol count, id).
    passive: BTreeSet<(usize, usize)>,
    /// Passive ids in age order; every `AGE_RATIO`th pick is the oldest.
    passive_age: BTreeSet<usize>,
    picks: usize,
    active: Vec<usize>,
}

fn symbol_count(c: &Clause) -> usize {
    c.literals.iter().map(|l| 1 + l.args.iter().map(Term::size).sum::<usize>()).sum()
}

/// Renames variables to `X0, X1, ...` in order of first occurrence.
fn canonical(c: &Clause) -> Clause {
    let mut map = Subst::new();
    fn visit(t: &Term, map: &mut Subst) {
        match t {
            Term::Var(v) => {
                if !map.contains_key(v) {
                    let fresh = Term::Var(format!("X{}", map.len()));
                    map.insert(v.clone(), fresh);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| visit(a, map)),
        }
    }
    for l in &c.literals {
        l.args.iter().for_each(|a| visit(a, &mut map));
    }
    Clause::new(
        c.literals
            .iter()
            .map(|l| Literal {
                args: l.args.iter().map(|a| substitute_term(a, &map)).collect(),
                ..l.clone()
            })
            .collect(),
    )
}

fn rename_apart(c: &Clause) -> Clause {
    let mut map = Subst::new();
    for v in c.variables() {
        map.insert(v.clone(), Term::Var(format!("{v}_r")));
    }
    Clause::new(
        c.literals
            .iter()
            .map(|l| Literal {
                args: l.args.iter().map(|a| substitute_term(a, &map)).collect(),
                ..l.clone()
            })
            .collect(),
    )
}

fn subst_literal(l: &Literal, s: &Subst) -> Literal {
    Literal {
        args: l.args.iter().map(|a| substitute_term(a, s)).collect(),
        ..l.clone()
    }
}

/// Removes duplicate literals; `None` for tautologies.
fn tidy(lits: Vec<Literal>) -> Option<Clause> {
    let mut out: Vec<Literal> = Vec::with_capacity(lits.len());
    for l in lits {
        if l.is_equality() && l.args[0] == l.args[1] {
            if l.positive {
                return None;
            }
            continue;
        }
        if out.iter().any(|m| m.pred == l.pred && m.positive != l.positive && m.args == l.args) {
            return None;
        }
        if !out.contains(&l) {
            out.push(l);
        }
    }
    Some(Clause::new(out))
}

/// One-way matching: extends `s` so that `pattern` instantiated equals `target`.
fn match_term(pattern: &Term, target: &Term, s: &mut Subst) -> bool {
    match (pattern, target) {
        (Term::Var(v), _) => match s.get(v) {
            Some(bound) => bound == target,
            None => {
                s.insert(v.clone(), target.clone());
                true
            }
        },
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s))
        }
        _ => false,
    }
}

/// θ-subsumption: some σ maps every literal of `c` onto a literal of `d`.
fn subsumes(c: &Clause, d: &Clause) -> bool {
    fn go(lits: &[Literal], d: &Clause, s: &Subst) -> bool {
        let Some((first, rest)) = lits.split_first() else {
            return true;
        };
        d.literals.iter().any(|m| {
            if m.positive != first.positive || m.pred != first.pred || m.args.len() != first.args.len() {
                return false;
            }
            let mut s2 = s.clone();
            first.args.iter().zip(&m.args).all(|(a, b)| match_term(a, b, &mut s2)) && go(rest, d, &s2)
        })
    }
    c.literals.len() <= d.literals.len() && go(&c.literals, d, &Subst::new())
}

/// Fraction of the time limit spent without equality axioms.
const QUICK_SHARE: f64 = 0.25;

impl Saturation {
    fn with_inputs(inputs: &[(Clause, Origin)], axioms: &[Clause]) -> Self {
        let mut s = Saturation::default();
        for (c, o) in inputs {
            s.keep(c.clone(), o.clone());
        }
        for c in axioms {
            s.keep(c.clone(), Origin::EqualityAxiom);
        }
        s
    }

    /// Stores `c` unless it is a duplicate or subsumed by an active clause.
    fn keep(&mut self, c: Clause, origin: Origin) -> Option<usize> {
        let c = canonical(&c);
        if self.seen.contains(&c) {
            return None;
        }
        if self.active.iter().any(|&a| subsumes(&self.records[a].clause, &c)) {
            return None;
        }
        let id = self.records.len();
        self.passive.insert((symbol_count(&c), id));
        self.passive_age.insert(id);
        self.seen.insert(c.clone());
        self.records.push(Record { clause: c, origin });
        Some(id)
    }

    fn select(&mut self) -> Option<usize> {
        self.picks += 1;
        let id = if self.picks % AGE_RATIO == 0 {
            *self.passive_age.first()?
        } else {
            self.passive.first()?.1
        };
        self.passive_age.remove(&id);
        self.passive.remove(&(symbol_count(&self.records[id].clause), id));
        Some(id)
    }

    fn run(&mut self, limits: &Limits, start: Instant) -> Outcome {
        if let Some(id) = self.records.iter().position(|r| r.clause.is_empty()) {
            return Outcome::Proof(id);
        }
        while let Some(given) = self.select() {
            if start.elapsed().as_secs_f64() > limits.max_seconds {
                return Outcome::TimeLimit;
            }
            let gclause = self.records[given].clause.clone();
            if self.active.iter().any(|&a| subsumes(&self.records[a].clause, &gclause)) {
                continue;
            }
            self.active.push(given);
            let mut fresh: Vec<(Vec<Literal>, Origin)> = Vec::new();
            for f in factors(&gclause) {
                fresh.push((f, Origin::Factor(given)));
            }
            let renamed = rename_apart(&gclause);
            for &other in &self.active {
                let oclause = &self.records[other].clause;
                for r in resolvents(&renamed, oclause) {
                    fresh.push((r, Origin::Resolution(given, other)));
                }
            }
            for (lits, origin) in fresh {
                let Some(c) = tidy(lits) else { continue };
                let empty = c.is_empty();
                if let Some(id) = self.keep(c, origin) {
                    if empty {
                        return Outcome::Proof(id);
                    }
                }
                if self.records.len() > limits.max_clauses {
                    return Outcome::ClauseLimit;
                }
            }
        }
        Outcome::Saturated
    }

    fn ancestors(&self, id: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(i) = stack.pop() {
            if !seen.insert(i) {
                continue;
            }
            match self.records[i].origin {
                Origin::Resolution(a, b) => stack.extend([a, b]),
                Origin::Factor(a) => stack.push(a),
                Origin::Input(_) | Origin::EqualityAxiom => {}
            }
        }
        seen.into_iter().collect()
    }

    /// The refutation as TSTP: used inputs as `fof`, then the clause steps.
    fn tstp(&self, statements: &[Statement], used: &BTreeSet<usize>, ancestors: &[usize]) -> String {
        let mut out = String::from("% SZS status Theorem\n% SZS output start CNFRefutation\n");
        let mut input_names = BTreeMap::new();
        for &i in used {
            let s = &statements[i];
            let name = crate::syntax::lex::quote_name(&s.name);
            if s.negated_conjecture {
                out.push_str(&format!("fof({name}, conjecture, {}, file('task', {name})).\n", s.formula));
                let neg = crate::syntax::lex::quote_name(&format!("{}_negated", s.name));
                out.push_str(&format!(
                    "fof({neg}, negated_conjecture, ~({}), inference(assume_negation, [status(cth)], [{name}])).\n",
                    s.formula
                ));
                input_names.insert(i, neg);
            } else {
                out.push_str(&format!("fof({name}, axiom, {}, file('task', {name})).\n", s.formula));
                input_names.insert(i, name);
            }
        }
        for &id in ancestors {
            let r = &self.records[id];
            let (role, source) = match &r.origin {
                Origin::Input(i) => (
                    if statements[*i].negated_conjecture { "negated_conjecture" } else { "plain" },
                    format!("inference(clausify, [status(thm)], [{}])", input_names[i]),
                ),
                Origin::EqualityAxiom => ("axiom", "introduced(equality_axiom)".to_owned()),
                Origin::Resolution(a, b) => ("plain", format!("inference(resolution, [status(thm)], [c_{a}, c_{b}])")),
                Origin::Factor(a) => ("plain", format!("inference(factoring, [status(thm)], [c_{a}])")),
            };
            out.push_str(&format!("cnf(c_{id}, {role}, {}, {source}).\n", r.clause));
        }
        out.push_str("% SZS output end CNFRefutation\n");
        out
    }
}

fn factors(c: &Clause) -> Vec<Vec<Literal>> {
    let mut out = Vec::new();
    let lits = &c.literals;
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            let (a, b) = (&lits[i], &lits[j]);
            if a.positive != b.positive || a.pred != b.pred {
                continue;
            }
            if let Some(s) = unify_args(&a.args, &b.args) {
                let f: Vec<Literal> = lits.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, l)| subst_literal(l, &s)).collect();
                out.push(f);
            }
        }
    }
    out
}

fn resolvents(a: &Clause, b: &Clause) -> Vec<Vec<Literal>> {
    let mut out = Vec::new();
    for (i, la) in a.literals.iter().enumerate() {
        for (j, lb) in b.literals.iter().enumerate() {
            if la.positive == lb.positive || la.pred != lb.pred {
                continue;
            }
            if let Some(s) = unify_args(&la.args, &lb.args) {
                let mut r: Vec<Literal> = Vec::with_capacity(a.literals.len() + b.literals.len() - 2);
                r.extend(a.literals.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, l)| subst_literal(l, &s)));
                r.extend(b.literals.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, l)| subst_literal(l, &s)));
                out.push(r);
            }
        }
    }
    out
}
