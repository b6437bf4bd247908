use std::collections::{BTreeMap, HashMap};

use super::DerivationGraph;
use crate::engine::Plan;
use crate::formula_ops::free_variables;
use crate::syntax::{Formula, Role, Term};

/// Pooled statements no derivation mentions. Removal is left to the user.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnusedReport {
    /// Checked lemmas and checked definitions.
    pub lemmas: Vec<String>,
    /// Axioms, hypotheses and plain definitions of the base specification.
    pub base_axioms: Vec<String>,
    /// No derivation was supplied, so nothing counts as used.
    pub no_evidence: bool,
}

/// Matches pooled statements against derivation nodes by name (the node's
/// own or its `file(...)` name), then by formula up to bound-variable
/// renaming for inputs a prover renamed.
pub fn unused_lemmas(plan: &Plan, derivations: &BTreeMap<String, DerivationGraph>) -> UnusedReport {
    let mut report = UnusedReport {
        no_evidence: derivations.is_empty(),
        ..Default::default()
    };
    for s in &plan.pool {
        let used = derivations.values().any(|g| {
            g.nodes.iter().any(|n| {
                n.name == s.name
                    || n.input_name.as_deref() == Some(&s.name)
                    || (n.is_input() && alpha_equivalent(&n.formula, &s.formula))
            })
        });
        if used {
            continue;
        }
        match plan.pool_roles.get(&s.name).copied().unwrap_or(s.role) {
            Role::CheckedLemma | Role::CheckedDefinition => report.lemmas.push(s.name.clone()),
            _ => report.base_axioms.push(s.name.clone()),
        }
    }
    report
}

/// Equality up to renaming of variables. Free variables count as implicitly
/// universal, so `p(X)` matches `![Y]: p(Y)`.
pub fn alpha_equivalent(a: &Formula, b: &Formula) -> bool {
    canonical(&close(a)) == canonical(&close(b))
}

fn close(f: &Formula) -> Formula {
    let free: Vec<String> = free_variables(f).into_iter().collect();
    match f {
        _ if free.is_empty() => f.clone(),
        Formula::Quant(crate::syntax::Quantifier::Forall, vs, body) => {
            let mut all = free;
            all.extend(vs.iter().cloned());
            Formula::Quant(crate::syntax::Quantifier::Forall, all, body.clone())
        }
        _ => Formula::Quant(crate::syntax::Quantifier::Forall, free, Box::new(f.clone())),
    }
}

/// Bound variables renamed `V0, V1, ...` in binding order. Adjacent `!`
/// prefixes merge, and variable order inside one prefix is normalized by first
/// use in the body.
fn canonical(f: &Formula) -> Formula {
    fn go(f: &Formula, env: &mut HashMap<String, Vec<String>>, next: &mut usize) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|t| term(t, env)).collect()),
            Formula::Eq(l, r) => Formula::Eq(term(l, env), term(r, env)),
            Formula::Not(g) => Formula::not(go(g, env, next)),
            Formula::Binary(c, l, r) => Formula::binary(*c, go(l, env, next), go(r, env, next)),
            Formula::Quant(q, _, _) => {
                let (vars, body) = prefix(f, *q);
                let order = first_use(body, &vars);
                let mut names = Vec::new();
                for v in &order {
                    let fresh = format!("V{next}");
                    *next += 1;
                    env.entry(v.clone()).or_default().push(fresh.clone());
                    names.push(fresh);
                }
                let inner = go(body, env, next);
                for v in &order {
                    env.get_mut(v).expect("bound above").pop();
                }
                if names.is_empty() {
                    inner
                } else {
                    Formula::Quant(*q, names, Box::new(inner))
                }
            }
        }
    }
    fn term(t: &Term, env: &HashMap<String, Vec<String>>) -> Term {
        match t {
            Term::Var(v) => Term::Var(env.get(v).and_then(|s| s.last()).cloned().unwrap_or_else(|| v.clone())),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| term(a, env)).collect()),
        }
    }
    go(f, &mut HashMap::new(), &mut 0)
}

/// Variables of a maximal same-quantifier prefix, innermost binding winning.
fn prefix(f: &Formula, q: crate::syntax::Quantifier) -> (Vec<String>, &Formula) {
    let mut vars: Vec<String> = Vec::new();
    let mut cur = f;
    while let Formula::Quant(q2, vs, body) = cur {
        if *q2 != q {
            break;
        }
        for v in vs {
            vars.retain(|w| w != v);
            vars.push(v.clone());
        }
        cur = body;
    }
    (vars, cur)
}

/// `vars` that occur free in `body`, in order of first occurrence.
fn first_use(body: &Formula, vars: &[String]) -> Vec<String> {
    fn visit_term(t: &Term, vars: &[String], bound: &[String], out: &mut Vec<String>) {
        match t {
            Term::Var(v) => {
                if vars.contains(v) && !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| visit_term(a, vars, bound, out)),
        }
    }
    fn visit(f: &Formula, vars: &[String], bound: &mut Vec<String>, out: &mut Vec<String>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| visit_term(a, vars, bound, out)),
            Formula::Eq(l, r) => {
                visit_term(l, vars, bound, out);
                visit_term(r, vars, bound, out);
            }
            Formula::Not(g) => visit(g, vars, bound, out),
            Formula::Binary(_, l, r) => {
                visit(l, vars, bound, out);
                visit(r, vars, bound, out);
            }
            Formula::Quant(_, vs, g) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                visit(g, vars, bound, out);
                bound.truncate(n);
            }
        }
    }
    let mut out = Vec::new();
    visit(body, vars, &mut Vec::new(), &mut out);
    out
}
