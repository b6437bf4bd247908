use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Formula, Term};

pub type Subst = BTreeMap<String, Term>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Predicate,
    Function,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn predicate(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
            kind: SymbolKind::Predicate,
        }
    }

    pub fn function(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
            kind: SymbolKind::Function,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Known symbols. Name clashes are checked at name level, across kinds and arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: BTreeSet<Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: Symbol) {
        self.symbols.insert(s);
    }

    pub fn extend(&mut self, it: impl IntoIterator<Item = Symbol>) {
        self.symbols.extend(it);
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.symbols.contains(s)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.symbols.iter().any(|s| s.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl FromIterator<Symbol> for SymbolTable {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        SymbolTable {
            symbols: iter.into_iter().collect(),
        }
    }
}

pub fn term_variables(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(v) => {
            out.insert(v.clone());
        }
        Term::App(_, args) => args.iter().for_each(|a| term_variables(a, out)),
    }
}

pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(f, &mut Vec::new(), &mut out);
    out
}

fn collect_free<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    let mut add = |t: &Term| {
        let mut vs = BTreeSet::new();
        term_variables(t, &mut vs);
        out.extend(vs.into_iter().filter(|v| !bound.contains(&v.as_str())));
    };
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(_, args) => args.iter().for_each(&mut add),
        Formula::Eq(l, r) => {
            add(l);
            add(r);
        }
        Formula::Not(g) => collect_free(g, bound, out),
        Formula::Binary(_, l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Formula::Quant(_, vs, body) => {
            let n = bound.len();
            bound.extend(vs.iter().map(String::as_str));
            collect_free(body, bound, out);
            bound.truncate(n);
        }
    }
}

fn term_symbols(t: &Term, out: &mut BTreeSet<Symbol>) {
    if let Term::App(name, args) = t {
        out.insert(Symbol::function(name.clone(), args.len()));
        args.iter().for_each(|a| term_symbols(a, out));
    }
}

/// Predicate and function symbols of `f`; equality and `$true`/`$false` are not symbols.
pub fn formula_symbols(f: &Formula) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    fn walk(f: &Formula, out: &mut BTreeSet<Symbol>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Atom(p, args) => {
                out.insert(Symbol::predicate(p.clone(), args.len()));
                args.iter().for_each(|a| term_symbols(a, out));
            }
            Formula::Eq(l, r) => {
                term_symbols(l, out);
                term_symbols(r, out);
            }
            Formula::Not(g) | Formula::Quant(_, _, g) => walk(g, out),
            Formula::Binary(_, l, r) => {
                walk(l, out);
                walk(r, out);
            }
        }
    }
    walk(f, &mut out);
    out
}

pub fn substitute_term(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(name, args) => Term::App(name.clone(), args.iter().map(|a| substitute_term(a, s)).collect()),
    }
}

/// Capture-avoiding substitution. A bound variable is renamed to `V_k`
/// (smallest k free of clashes) only when it would capture a variable of
/// a substituted term.
pub fn substitute(f: &Formula, s: &Subst) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| substitute_term(a, s)).collect()),
        Formula::Eq(l, r) => Formula::Eq(substitute_term(l, s), substitute_term(r, s)),
        Formula::Not(g) => Formula::not(substitute(g, s)),
        Formula::Binary(c, l, r) => Formula::binary(*c, substitute(l, s), substitute(r, s)),
        Formula::Quant(q, vs, body) => {
            let body_free = free_variables(body);
            let inner: Subst = s
                .iter()
                .filter(|(k, _)| !vs.contains(k) && body_free.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return f.clone();
            }
            let mut incoming = BTreeSet::new();
            for t in inner.values() {
                term_variables(t, &mut incoming);
            }
            let mut inner = inner;
            let mut new_vs = Vec::with_capacity(vs.len());
            for v in vs {
                if incoming.contains(v) {
                    let fresh = fresh_name(v, |c| {
                        incoming.contains(c) || body_free.contains(c) || vs.iter().any(|w| w == c) || new_vs.iter().any(|w: &String| w == c)
                    });
                    inner.insert(v.clone(), Term::Var(fresh.clone()));
                    new_vs.push(fresh);
                } else {
                    new_vs.push(v.clone());
                }
            }
            Formula::Quant(*q, new_vs, Box::new(substitute(body, &inner)))
        }
    }
}

fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|c| !taken(c))
        .expect("unbounded")
}
