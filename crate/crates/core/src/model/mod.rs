//! Finite, possibly partial models with strong Kleene evaluation.

mod eval;
mod search;
mod text;

use std::collections::BTreeMap;
use std::fmt;

pub use eval::{check_axioms, check_axioms_relativized, evaluate, evaluate_closed, evaluate_relativized, AxiomReport, EvalError, TruthValue};
pub use search::{brute_force_validity, enumerate_models, find_model, satisfies, BudgetExceeded, Validity, DEFAULT_BUDGET};
pub use text::ModelParseError;

/// Interpretation tables over a finite domain. Constants are zero-arity
/// functions; missing entries are undefined.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialModel {
    domain: Vec<String>,
    index: BTreeMap<String, usize>,
    functions: BTreeMap<String, Table<usize>>,
    predicates: BTreeMap<String, Table<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Table<V> {
    arity: usize,
    entries: BTreeMap<Vec<usize>, V>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("`{0}` is not a domain element")]
    UnknownElement(String),
    #[error("`{name}` used with arity {got}, previously {expected}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("duplicate domain element `{0}`")]
    DuplicateElement(String),
    #[error("`{name}` is already defined at this tuple")]
    Redefined { name: String },
}

impl PartialModel {
    pub fn new<S: Into<String>>(domain: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let mut m = PartialModel::default();
        for e in domain {
            let e = e.into();
            if m.index.contains_key(&e) {
                return Err(ModelError::DuplicateElement(e));
            }
            m.index.insert(e.clone(), m.domain.len());
            m.domain.push(e);
        }
        Ok(m)
    }

    /// Domain `d1..dn`.
    pub fn numbered(n: usize) -> Self {
        Self::new((1..=n).map(|i| format!("d{i}"))).expect("distinct names")
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn element_name(&self, e: usize) -> &str {
        &self.domain[e]
    }

    pub fn function(&self, name: &str, args: &[usize]) -> Option<usize> {
        self.functions.get(name)?.entries.get(args).copied()
    }

    pub fn predicate(&self, name: &str, args: &[usize]) -> Option<bool> {
        self.predicates.get(name)?.entries.get(args).copied()
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).map(|t| t.arity)
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).map(|t| t.arity)
    }

    /// Defines (or overwrites) a function entry.
    pub fn set_function(&mut self, name: &str, args: &[usize], value: usize) -> Result<(), ModelError> {
        let table = table_for(&mut self.functions, name, args.len())?;
        table.entries.insert(args.to_vec(), value);
        Ok(())
    }

    pub fn set_predicate(&mut self, name: &str, args: &[usize], value: bool) -> Result<(), ModelError> {
        let table = table_for(&mut self.predicates, name, args.len())?;
        table.entries.insert(args.to_vec(), value);
        Ok(())
    }

    pub fn unset_function(&mut self, name: &str, args: &[usize]) {
        if let Some(t) = self.functions.get_mut(name) {
            t.entries.remove(args);
        }
    }

    pub fn unset_predicate(&mut self, name: &str, args: &[usize]) {
        if let Some(t) = self.predicates.get_mut(name) {
            t.entries.remove(args);
        }
    }

    /// Sets a function entry by element names.
    pub fn set_function_named(&mut self, name: &str, args: &[&str], value: &str) -> Result<(), ModelError> {
        let args = self.elements(args)?;
        let value = self.element(value).ok_or_else(|| ModelError::UnknownElement(value.to_owned()))?;
        self.set_function(name, &args, value)
    }

    pub fn set_predicate_named(&mut self, name: &str, args: &[&str], value: bool) -> Result<(), ModelError> {
        let args = self.elements(args)?;
        self.set_predicate(name, &args, value)
    }

    fn elements(&self, names: &[&str]) -> Result<Vec<usize>, ModelError> {
        names
            .iter()
            .map(|n| self.element(n).ok_or_else(|| ModelError::UnknownElement((*n).to_owned())))
            .collect()
    }

    pub fn function_entries(&self) -> impl Iterator<Item = (&str, &[usize], usize)> {
        self.functions
            .iter()
            .flat_map(|(n, t)| t.entries.iter().map(move |(a, v)| (n.as_str(), a.as_slice(), *v)))
    }

    pub fn predicate_entries(&self) -> impl Iterator<Item = (&str, &[usize], bool)> {
        self.predicates
            .iter()
            .flat_map(|(n, t)| t.entries.iter().map(move |(a, v)| (n.as_str(), a.as_slice(), *v)))
    }

    /// Number of defined entries.
    pub fn defined_entries(&self) -> usize {
        self.functions.values().map(|t| t.entries.len()).sum::<usize>()
            + self.predicates.values().map(|t| t.entries.len()).sum::<usize>()
    }

    /// True when `other` agrees with every entry defined here.
    pub fn is_extended_by(&self, other: &PartialModel) -> bool {
        self.domain == other.domain
            && self.function_entries().all(|(n, a, v)| other.function(n, a) == Some(v))
            && self.predicate_entries().all(|(n, a, v)| other.predicate(n, a) == Some(v))
    }
}

fn table_for<'a, V>(
    tables: &'a mut BTreeMap<String, Table<V>>,
    name: &str,
    arity: usize,
) -> Result<&'a mut Table<V>, ModelError> {
    let table = tables.entry(name.to_owned()).or_insert_with(|| Table {
        arity,
        entries: BTreeMap::new(),
    });
    if table.arity != arity {
        return Err(ModelError::Arity {
            name: name.to_owned(),
            expected: table.arity,
            got: arity,
        });
    }
    Ok(table)
}

impl fmt::Display for PartialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {}", self.domain.join(" "))?;
        let tuple = |args: &[usize]| {
            if args.is_empty() {
                String::new()
            } else {
                let names: Vec<&str> = args.iter().map(|&a| self.domain[a].as_str()).collect();
                format!("({})", names.join(","))
            }
        };
        for (name, args, v) in self.function_entries() {
            writeln!(f, "fun {name}{} = {}", tuple(args), self.domain[v])?;
        }
        for (name, args, v) in self.predicate_entries() {
            writeln!(f, "pred {name}{} = {v}", tuple(args))?;
        }
        Ok(())
    }
}
