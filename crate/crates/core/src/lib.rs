//! First-order proof workbench.
//!
//! Parses TPTP/TPI proof scripts, plans and runs checked-lemma pipelines
//! against pluggable provers, evaluates formulas on partial finite models,
//! and analyzes prover derivations.

pub mod analysis;
pub mod dijkstra;
pub mod engine;
pub mod formula_ops;
pub mod model;
pub mod prover;
pub mod syntax;
