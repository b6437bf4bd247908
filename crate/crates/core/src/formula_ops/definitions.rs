use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::vars::{formula_symbols, free_variables, substitute, substitute_term, term_variables, Subst, Symbol, SymbolKind, SymbolTable};
use crate::syntax::{AnnotatedStatement, Connective, Formula, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefinitionKind {
    PredicateIff,
    FunctionEq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefinitionBody {
    Formula(Formula),
    Term(Term),
}

/// `![Vs]: (p(Vs) <=> Body)` or `![Vs]: f(Vs) = Body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    /// Name of the defining statement.
    pub statement: String,
    pub head: Symbol,
    pub params: Vec<String>,
    pub body: DefinitionBody,
}

impl Definition {
    pub fn kind(&self) -> DefinitionKind {
        match self.body {
            DefinitionBody::Formula(_) => DefinitionKind::PredicateIff,
            DefinitionBody::Term(_) => DefinitionKind::FunctionEq,
        }
    }

    fn body_symbols(&self) -> BTreeSet<Symbol> {
        match &self.body {
            DefinitionBody::Formula(f) => formula_symbols(f),
            DefinitionBody::Term(t) => formula_symbols(&Formula::Eq(t.clone(), t.clone())),
        }
    }

    fn bind(&self, args: &[Term]) -> Subst {
        self.params.iter().cloned().zip(args.iter().cloned()).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DefinitionError {
    #[error("`{statement}`: symbol `{name}` is already known; a checked definition must introduce a new name")]
    HeadKnown { statement: String, name: String },
    #[error("`{statement}`: body uses unknown symbol {symbol}")]
    UnknownSymbol { statement: String, symbol: Symbol },
    #[error("`{statement}`: {reason}")]
    Malformed { statement: String, reason: String },
    #[error("`{statement}`: parameter {var} is repeated")]
    RepeatedParam { statement: String, var: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpandError {
    #[error("cyclic definitions: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
}

pub fn recognize_definition(stmt: &AnnotatedStatement, known: &SymbolTable) -> Result<Definition, DefinitionError> {
    let name = &stmt.name;
    let malformed = |reason: &str| DefinitionError::Malformed {
        statement: name.clone(),
        reason: reason.to_owned(),
    };
    let (vars, body) = stmt.formula.strip_forall();
    let mut seen = BTreeSet::new();
    for v in &vars {
        if !seen.insert(v) {
            return Err(DefinitionError::RepeatedParam {
                statement: name.clone(),
                var: v.clone(),
            });
        }
    }
    let (head, args, def_body) = match body {
        Formula::Binary(Connective::Iff, lhs, rhs) => match &**lhs {
            Formula::Atom(p, args) => (Symbol::predicate(p.clone(), args.len()), args, DefinitionBody::Formula((**rhs).clone())),
            _ => return Err(malformed("left side of <=> is not an atom")),
        },
        Formula::Eq(Term::App(fun, args), rhs) => (Symbol::function(fun.clone(), args.len()), args, DefinitionBody::Term(rhs.clone())),
        _ => return Err(malformed("expected `![Vs]: (p(Vs) <=> Body)` or `![Vs]: f(Vs) = Body`")),
    };
    let mut params = Vec::with_capacity(args.len());
    for a in args {
        match a {
            Term::Var(v) if params.contains(v) => {
                return Err(DefinitionError::RepeatedParam {
                    statement: name.clone(),
                    var: v.clone(),
                })
            }
            Term::Var(v) => params.push(v.clone()),
            _ => return Err(malformed("head arguments must be variables")),
        }
    }
    if params.iter().collect::<BTreeSet<_>>() != seen {
        return Err(malformed(&format!(
            "head parameters ({}) do not match the quantified variables ({})",
            params.join(","),
            vars.join(",")
        )));
    }
    if known.contains_name(&head.name) {
        return Err(DefinitionError::HeadKnown {
            statement: name.clone(),
            name: head.name,
        });
    }
    let def = Definition {
        statement: name.clone(),
        head,
        params,
        body: def_body,
    };
    for s in def.body_symbols() {
        if !known.contains(&s) {
            return Err(DefinitionError::UnknownSymbol {
                statement: name.clone(),
                symbol: s,
            });
        }
    }
    let body_free = match &def.body {
        DefinitionBody::Formula(f) => free_variables(f),
        DefinitionBody::Term(t) => {
            let mut s = BTreeSet::new();
            term_variables(t, &mut s);
            s
        }
    };
    if let Some(v) = body_free.iter().find(|v| !def.params.contains(v)) {
        return Err(malformed(&format!("body mentions variable {v} outside the parameters")));
    }
    Ok(def)
}

fn check_acyclic(defs: &[Definition]) -> Result<(), ExpandError> {
    let heads: BTreeMap<&str, &Definition> = defs.iter().map(|d| (d.head.name.as_str(), d)).collect();
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit<'a>(
        name: &'a str,
        heads: &BTreeMap<&'a str, &'a Definition>,
        marks: &mut BTreeMap<&'a str, Mark>,
        path: &mut Vec<&'a str>,
    ) -> Result<(), ExpandError> {
        match marks.get(name) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => {
                let start = path.iter().position(|n| *n == name).unwrap_or(0);
                let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                cycle.push(name.to_owned());
                return Err(ExpandError::Cycle(cycle));
            }
            None => {}
        }
        marks.insert(name, Mark::Active);
        path.push(name);
        let def = heads[name];
        for s in def.body_symbols() {
            if let Some((k, _)) = heads.get_key_value(s.name.as_str()) {
                visit(k, heads, marks, path)?;
            }
        }
        path.pop();
        marks.insert(name, Mark::Done);
        Ok(())
    }
    let mut marks = BTreeMap::new();
    for name in heads.keys() {
        visit(name, &heads, &mut marks, &mut Vec::new())?;
    }
    Ok(())
}

/// Replaces every defined atom and term by its definition body until none remain.
pub fn expand_definitions(f: &Formula, defs: &[Definition]) -> Result<Formula, ExpandError> {
    if defs.is_empty() {
        return Ok(f.clone());
    }
    check_acyclic(defs)?;
    let by_head: BTreeMap<(&str, usize, SymbolKind), &Definition> = defs
        .iter()
        .map(|d| ((d.head.name.as_str(), d.head.arity, d.head.kind), d))
        .collect();
    Ok(Expander { by_head }.formula(f))
}

struct Expander<'a> {
    by_head: BTreeMap<(&'a str, usize, SymbolKind), &'a Definition>,
}

impl Expander<'_> {
    fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(name, args) => {
                let args: Vec<Term> = args.iter().map(|a| self.term(a)).collect();
                match self.by_head.get(&(name.as_str(), args.len(), SymbolKind::Function)) {
                    Some(def) => match &def.body {
                        DefinitionBody::Term(body) => self.term(&substitute_term(body, &def.bind(&args))),
                        DefinitionBody::Formula(_) => Term::App(name.clone(), args),
                    },
                    None => Term::App(name.clone(), args),
                }
            }
        }
    }

    fn formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(p, args) => {
                let args: Vec<Term> = args.iter().map(|a| self.term(a)).collect();
                match self.by_head.get(&(p.as_str(), args.len(), SymbolKind::Predicate)) {
                    Some(def) => match &def.body {
                        DefinitionBody::Formula(body) => self.formula(&substitute(body, &def.bind(&args))),
                        DefinitionBody::Term(_) => Formula::Atom(p.clone(), args),
                    },
                    None => Formula::Atom(p.clone(), args),
                }
            }
            Formula::Eq(l, r) => Formula::Eq(self.term(l), self.term(r)),
            Formula::Not(g) => Formula::not(self.formula(g)),
            Formula::Binary(c, l, r) => Formula::binary(*c, self.formula(l), self.formula(r)),
            Formula::Quant(q, vs, body) => Formula::Quant(*q, vs.clone(), Box::new(self.formula(body))),
        }
    }
}

/// Splits `![Vs]: (C1 & ... & Cn)` into `<name>_part_i` statements, each
/// closed over only the variables it uses.
pub fn split_conjunction(stmt: &AnnotatedStatement) -> Vec<AnnotatedStatement> {
    let (vars, body) = stmt.formula.strip_forall();
    let parts = body.flatten(Connective::And);
    if parts.len() <= 1 {
        return vec![stmt.clone()];
    }
    parts
        .into_iter()
        .enumerate()
        .map(|(i, part)| {
            let free = free_variables(part);
            let mut own: Vec<String> = Vec::new();
            for v in &vars {
                if free.contains(v) && !own.contains(v) {
                    own.push(v.clone());
                }
            }
            let mut out = AnnotatedStatement::new(format!("{}_part_{}", stmt.name, i + 1), stmt.role, Formula::forall(own, part.clone()));
            out.language = stmt.language;
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Role};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn def_stmt(name: &str, text: &str) -> AnnotatedStatement {
        AnnotatedStatement::new(name, Role::CheckedDefinition, f(text))
    }

    const SAFETY: &str = "![T,A1,A2]: (safe_for(T,A1,A2)<=>((active_state(T,A1)=criticalSection & active_state(T,A2)=criticalSection) => A1=A2))";

    fn safety_known() -> SymbolTable {
        [Symbol::function("active_state", 2), Symbol::function("criticalSection", 0)].into_iter().collect()
    }

    #[test]
    fn recognizes_safety_definition() {
        let d = recognize_definition(&def_stmt("define_safety_for", SAFETY), &safety_known()).unwrap();
        assert_eq!(d.head, Symbol::predicate("safe_for", 3));
        assert_eq!(d.kind(), DefinitionKind::PredicateIff);
        assert_eq!(d.params, ["T", "A1", "A2"]);
    }

    #[test]
    fn redefinition_is_rejected() {
        let mut known = safety_known();
        let d = recognize_definition(&def_stmt("d", SAFETY), &known).unwrap();
        known.insert(d.head);
        let err = recognize_definition(&def_stmt("d2", SAFETY), &known).unwrap_err();
        assert!(matches!(err, DefinitionError::HeadKnown { ref name, .. } if name == "safe_for"));
    }

    #[test]
    fn function_definition() {
        let known: SymbolTable = [Symbol::function("f", 1)].into_iter().collect();
        let d = recognize_definition(&def_stmt("g_def", "![X]: (g(X) = f(f(X)))"), &known).unwrap();
        assert_eq!(d.head, Symbol::function("g", 1));
        assert_eq!(d.kind(), DefinitionKind::FunctionEq);
    }

    #[test]
    fn shape_errors() {
        let known: SymbolTable = [Symbol::predicate("q", 1)].into_iter().collect();
        let cases = [
            ("![X]: (p(X) => q(X))", "malformed"),
            ("![X]: (p(X,X) <=> q(X))", "repeated"),
            ("![X,X]: (p(X) <=> q(X))", "repeated"),
            ("![X]: (p(X) <=> r(X))", "unknown"),
            ("![X,Y]: (p(X) <=> q(X))", "malformed"),
            ("![X]: (p(a) <=> q(X))", "malformed"),
            ("![X]: (p(X) <=> q(Y))", "malformed"),
        ];
        for (text, want) in cases {
            let err = recognize_definition(&def_stmt("d", text), &known).unwrap_err();
            let got = match err {
                DefinitionError::Malformed { .. } => "malformed",
                DefinitionError::RepeatedParam { .. } => "repeated",
                DefinitionError::UnknownSymbol { .. } => "unknown",
                DefinitionError::HeadKnown { .. } => "known",
            };
            assert_eq!(got, want, "{text}");
        }
    }

    #[test]
    fn expands_safety() {
        let d = recognize_definition(&def_stmt("d", SAFETY), &safety_known()).unwrap();
        let out = expand_definitions(&f("safe_for(t0,a,b)"), &[d]).unwrap();
        assert_eq!(out, f("(active_state(t0,a)=criticalSection & active_state(t0,b)=criticalSection) => a=b"));
    }

    #[test]
    fn expansion_chains_and_functions() {
        let mut known: SymbolTable = [Symbol::predicate("q", 1), Symbol::function("f", 1)].into_iter().collect();
        let p = recognize_definition(&def_stmt("dp", "![X]: (p(X) <=> ?[Y]: (q(g(Y)) & q(X)))"), &{
            let mut k = known.clone();
            k.insert(Symbol::function("g", 1));
            k
        })
        .unwrap();
        let g = recognize_definition(&def_stmt("dg", "![X]: g(X) = f(X)"), &known).unwrap();
        known.insert(g.head.clone());
        let out = expand_definitions(&f("p(Y)"), &[p, g]).unwrap();
        assert_eq!(out, f("?[Y_1]: (q(f(Y_1)) & q(Y))"));
    }

    #[test]
    fn empty_defs_is_identity() {
        let g = f("![X]: p(X)");
        assert_eq!(expand_definitions(&g, &[]).unwrap(), g);
    }

    #[test]
    fn cycles_are_rejected() {
        let p = Definition {
            statement: "dp".into(),
            head: Symbol::predicate("p", 1),
            params: vec!["X".into()],
            body: DefinitionBody::Formula(f("q(X)")),
        };
        let q = Definition {
            statement: "dq".into(),
            head: Symbol::predicate("q", 1),
            params: vec!["X".into()],
            body: DefinitionBody::Formula(f("~p(X)")),
        };
        assert!(matches!(expand_definitions(&f("p(a)"), &[p, q]), Err(ExpandError::Cycle(_))));
    }

    #[test]
    fn splitting() {
        let s = AnnotatedStatement::new("l", Role::CheckedLemma, f("![X,Y]: (p(X) & (r(Y) & q(X)))"));
        let parts = split_conjunction(&s);
        let got: Vec<_> = parts.iter().map(|p| (p.name.as_str(), p.formula.clone())).collect();
        assert_eq!(
            got,
            [("l_part_1", f("![X]: p(X)")), ("l_part_2", f("![Y]: r(Y)")), ("l_part_3", f("![X]: q(X)"))]
        );
        let single = AnnotatedStatement::new("s", Role::CheckedLemma, f("![T]: s(T)"));
        assert_eq!(split_conjunction(&single), vec![single.clone()]);
    }
}
