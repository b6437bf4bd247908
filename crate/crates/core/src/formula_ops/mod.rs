//! Pure formula transformations: variables, substitution, definitions,
//! conjunction splitting and clausification.

mod clausify;
mod definitions;
mod vars;

pub use clausify::{clausify, Clause, Literal, EQUALITY};
pub use definitions::{
    expand_definitions, recognize_definition, split_conjunction, Definition, DefinitionBody,
    DefinitionError, DefinitionKind, ExpandError,
};
pub use vars::{
    formula_symbols, free_variables, substitute, substitute_term, term_variables, Subst, Symbol,
    SymbolKind, SymbolTable,
};
