//! Dijkstra's mutual-exclusion protocol as example content: a first-order
//! specification generator and a simulator producing bounded runs.

mod run;
mod spec;

use thiserror::Error;

pub use run::{generate_run, run_model, simulate, RunTrace, Snapshot};
pub use spec::{default_invariant, generate_spec, generate_spec_text, generate_spec_with, invariant_from_script, DEFINED_NAMES};

pub const MIN_AGENTS: usize = 2;
pub const MAX_AGENTS: usize = 9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("agent count {0} is outside {MIN_AGENTS}..={MAX_AGENTS}")]
    AgentCount(usize),
    #[error("schedule has {got} entries but {expected} moments were requested")]
    ScheduleLength { expected: usize, got: usize },
    #[error("schedule entry {entry} at position {position} is not an agent index in 1..={n}")]
    ScheduleEntry { entry: usize, position: usize, n: usize },
    #[error("invariant: {0}")]
    Invariant(String),
}

fn check_agents(n: usize) -> Result<(), GenError> {
    if (MIN_AGENTS..=MAX_AGENTS).contains(&n) {
        Ok(())
    } else {
        Err(GenError::AgentCount(n))
    }
}

/// Program locations of one agent, in program order. Each is named after the
/// statement it is about to execute; `goto`s are folded into edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Loc {
    /// `Stealable_i <- false`
    StealableFalse,
    /// `if turn != i`
    CheckTurn,
    /// `Outside_i <- true` (waiting branch)
    OutsideTrue,
    /// `if Stealable_turn = true`
    CheckStealable,
    /// `turn <- i`
    TakeTurn,
    /// `Outside_i <- false`
    OutsideFalse,
    /// `counter_i <- 1`
    ForInit,
    /// the body of the `for` loop at the current counter
    ForTest,
    /// loop increment, or exit after `n`
    ForNext,
    CriticalSection,
    /// `Outside_i <- true` after the critical section
    ExitOutside,
    /// `Stealable_i <- true`
    ExitStealable,
    /// remainder of cycle, then back to the start
    Remainder,
}

impl Loc {
    pub const ALL: [Loc; 13] = [
        Loc::StealableFalse,
        Loc::CheckTurn,
        Loc::OutsideTrue,
        Loc::CheckStealable,
        Loc::TakeTurn,
        Loc::OutsideFalse,
        Loc::ForInit,
        Loc::ForTest,
        Loc::ForNext,
        Loc::CriticalSection,
        Loc::ExitOutside,
        Loc::ExitStealable,
        Loc::Remainder,
    ];

    pub fn constant(self) -> &'static str {
        match self {
            Loc::StealableFalse => "loc_stealable_false",
            Loc::CheckTurn => "loc_check_turn",
            Loc::OutsideTrue => "loc_outside_true",
            Loc::CheckStealable => "loc_check_stealable",
            Loc::TakeTurn => "loc_take_turn",
            Loc::OutsideFalse => "loc_outside_false",
            Loc::ForInit => "loc_for_init",
            Loc::ForTest => "loc_for_test",
            Loc::ForNext => "loc_for_next",
            Loc::CriticalSection => "criticalSection",
            Loc::ExitOutside => "loc_exit_outside",
            Loc::ExitStealable => "loc_exit_stealable",
            Loc::Remainder => "loc_remainder",
        }
    }
}

pub fn agent(i: usize) -> String {
    format!("a{i}")
}

pub fn counter_value(k: usize) -> String {
    format!("c{k}")
}

pub fn moment(i: usize) -> String {
    format!("t{i}")
}

pub const BTRUE: &str = "btrue";
pub const BFALSE: &str = "bfalse";

pub fn boolean(b: bool) -> &'static str {
    if b {
        BTRUE
    } else {
        BFALSE
    }
}

#[cfg(test)]
mod tests;
