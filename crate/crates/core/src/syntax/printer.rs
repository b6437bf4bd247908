//! Normalizing printer. Output reparses to a structurally identical AST.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;
use super::lex::quote_name;

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) => {
                f.write_str(name)?;
                write_args(f, args)
            }
        }
    }
}

fn write_args(f: &mut Formatter<'_>, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{a}")?;
    }
    f.write_char(')')
}

/// Formulas that never need parentheses as an operand.
fn is_atomic_like(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => true,
        Formula::Not(inner) => !matches!(**inner, Formula::Quant(..)),
        Formula::Binary(..) | Formula::Quant(..) => false,
    }
}

fn write_operand(f: &mut Formatter<'_>, g: &Formula) -> fmt::Result {
    if is_atomic_like(g) {
        write!(f, "{g}")
    } else {
        write!(f, "({g})")
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("$true"),
            Formula::False => f.write_str("$false"),
            Formula::Atom(p, args) => {
                f.write_str(p)?;
                write_args(f, args)
            }
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::Not(inner) => match &**inner {
                Formula::Eq(l, r) => write!(f, "{l} != {r}"),
                Formula::Not(g) if matches!(**g, Formula::Eq(..)) => write!(f, "~({inner})"),
                g @ Formula::Quant(..) => write!(f, "~{g}"),
                g => {
                    f.write_char('~')?;
                    write_operand(f, g)
                }
            },
            Formula::Binary(c, l, r) => {
                match &**l {
                    Formula::Binary(k, ..) if k == c && c.is_associative() => write!(f, "{l}")?,
                    g => write_operand(f, g)?,
                }
                write!(f, " {} ", c.symbol())?;
                write_operand(f, r)
            }
            Formula::Quant(q, vars, body) => {
                write!(f, "{}[{}]: ", q.symbol(), vars.join(","))?;
                match &**body {
                    Formula::Quant(..) => write!(f, "{body}"),
                    g => write_operand(f, g),
                }
            }
        }
    }
}

impl Display for GeneralTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            GeneralTerm::Word(w) if w.starts_with('$') => f.write_str(w),
            GeneralTerm::Word(w) => f.write_str(&quote_name(w)),
            GeneralTerm::Var(v) | GeneralTerm::Number(v) => f.write_str(v),
            GeneralTerm::Distinct(d) => {
                f.write_char('"')?;
                for c in d.chars() {
                    if c == '"' || c == '\\' {
                        f.write_char('\\')?;
                    }
                    f.write_char(c)?;
                }
                f.write_char('"')
            }
            GeneralTerm::App(name, args) => {
                write!(f, "{}(", GeneralTerm::Word(name.clone()))?;
                write_list(f, args)?;
                f.write_char(')')
            }
            GeneralTerm::List(items) => {
                f.write_char('[')?;
                write_list(f, items)?;
                f.write_char(']')
            }
            GeneralTerm::Colon(l, r) => write!(f, "{l}:{r}"),
        }
    }
}

fn write_list(f: &mut Formatter<'_>, items: &[GeneralTerm]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

fn name_list(names: &[String]) -> String {
    names.iter().map(|n| quote_name(n)).collect::<Vec<_>>().join(", ")
}

impl Display for TpiPayload {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            TpiPayload::AddCases { cases, target } => {
                write!(f, "{} => {}", quote_name(cases), quote_name(target))
            }
            TpiPayload::AssumePreviousValid { scope } => write!(f, "{scope}"),
            TpiPayload::RestrictPremises { lemma, premises } => {
                write!(f, "{} => [{}]", quote_name(lemma), name_list(premises))
            }
            TpiPayload::ExpandDefinitionsIn {
                statement,
                definitions,
            } => write!(f, "{} => [{}]", quote_name(statement), name_list(definitions)),
        }
    }
}

impl Display for AnnotatedStatement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}, {}, {}",
            self.language.keyword(),
            quote_name(&self.name),
            self.role,
            self.formula
        )?;
        if let Some(src) = &self.source {
            write!(f, ", {src}")?;
        }
        f.write_str(").")
    }
}

impl Display for TpiInstruction {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tpi({}, {}, {}).",
            quote_name(&self.name),
            self.verb(),
            self.payload
        )
    }
}

impl Display for ScriptItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ScriptItem::Statement(s) => write!(f, "{s}"),
            ScriptItem::Tpi(t) => write!(f, "{t}"),
        }
    }
}

impl Display for RawItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            RawItem::Statement(s) => write!(f, "{s}"),
            RawItem::Tpi(t) => write!(f, "{t}"),
            RawItem::Include(p) => write!(f, "include({}).", quote_name_always(p)),
        }
    }
}

fn quote_name_always(s: &str) -> String {
    let q = quote_name(s);
    if q.starts_with('\'') {
        q
    } else {
        format!("'{s}'")
    }
}

impl Display for ProofScript {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        Ok(())
    }
}

pub fn print_statement(stmt: &AnnotatedStatement) -> String {
    stmt.to_string()
}
