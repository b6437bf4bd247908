use thiserror::Error;

use crate::syntax::{AnnotatedStatement, Connective, Formula};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CaseError {
    #[error(
        "variables of `{cases}` [{}] are not a sub-sequence of those of `{target}` [{}]{}",
        .cases_vars.join(","),
        .target_vars.join(","),
        missing_note(.cases_vars, .target_vars)
    )]
    PrefixMismatch {
        cases: String,
        target: String,
        cases_vars: Vec<String>,
        target_vars: Vec<String>,
    },
    #[error("`{cases}` has free variables {} outside its quantifier prefix", .vars.join(","))]
    OpenCases { cases: String, vars: Vec<String> },
}

fn missing_note(cases: &[String], target: &[String]) -> String {
    let missing: Vec<&str> = cases.iter().filter(|v| !target.contains(v)).map(String::as_str).collect();
    if missing.is_empty() {
        "; order differs".to_owned()
    } else {
        format!("; missing from target: {}", missing.join(","))
    }
}

fn is_subsequence(small: &[String], big: &[String]) -> bool {
    let mut it = big.iter();
    small.iter().all(|v| it.any(|w| w == v))
}

/// Splits `target` into one lemma per disjunct of `cases`: `<target>_case_i`
/// is `![Ws]: ((H & Ci) => G)`, or `![Ws]: (Ci => G)` when the target is no
/// implication.
pub fn expand_cases(cases: &AnnotatedStatement, target: &AnnotatedStatement) -> Result<Vec<AnnotatedStatement>, CaseError> {
    let (vs, cbody) = cases.formula.strip_forall();
    let (ws, tbody) = target.formula.strip_forall();
    if !is_subsequence(&vs, &ws) {
        return Err(CaseError::PrefixMismatch {
            cases: cases.name.clone(),
            target: target.name.clone(),
            cases_vars: vs,
            target_vars: ws,
        });
    }
    let open: Vec<String> = crate::formula_ops::free_variables(cbody).into_iter().filter(|v| !vs.contains(v)).collect();
    if !open.is_empty() {
        return Err(CaseError::OpenCases {
            cases: cases.name.clone(),
            vars: open,
        });
    }
    let (hyp, goal) = match tbody {
        Formula::Binary(Connective::Implies, h, g) => (Some(&**h), &**g),
        g => (None, g),
    };
    Ok(cbody
        .flatten(Connective::Or)
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let premise = match hyp {
                Some(h) => Formula::and(h.clone(), c.clone()),
                None => c.clone(),
            };
            let body = Formula::implies(premise, goal.clone());
            let mut s = AnnotatedStatement::new(format!("{}_case_{}", target.name, i + 1), target.role, Formula::forall(ws.clone(), body));
            s.language = target.language;
            s
        })
        .collect())
}
