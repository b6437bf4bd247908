use std::collections::BTreeMap;

use crate::formula_ops::Subst;
use crate::syntax::Term;

fn walk<'a>(t: &'a Term, s: &'a Subst) -> &'a Term {
    let mut t = t;
    while let Term::Var(v) = t {
        match s.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

fn occurs(v: &str, t: &Term, s: &Subst) -> bool {
    match walk(t, s) {
        Term::Var(w) => w == v,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a, s)),
    }
}

fn unify_into(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let (a, b) = (walk(a, s).clone(), walk(b, s).clone());
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(x, t, s) {
                return false;
            }
            s.insert(x.clone(), t.clone());
            true
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_into(x, y, s))
        }
    }
}

/// Applies a (possibly triangular) substitution to a fixpoint.
pub fn apply(t: &Term, s: &Subst) -> Term {
    match walk(t, s) {
        Term::Var(v) => Term::Var(v.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| apply(a, s)).collect()),
    }
}

fn solved(s: &Subst) -> Subst {
    s.keys().map(|k| (k.clone(), apply(&Term::Var(k.clone()), s))).collect::<BTreeMap<_, _>>()
}

/// Most general unifier of `a` and `b`, in idempotent form.
pub fn unify(a: &Term, b: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    unify_into(a, b, &mut s).then(|| solved(&s))
}

/// Simultaneous unifier of two argument lists.
pub fn unify_args(xs: &[Term], ys: &[Term]) -> Option<Subst> {
    if xs.len() != ys.len() {
        return None;
    }
    let mut s = Subst::new();
    xs.iter().zip(ys).all(|(x, y)| unify_into(x, y, &mut s)).then(|| solved(&s))
}
