//! Prover interface: external ATPs speaking SZS, plus a small built-in
//! resolution prover.

mod builtin;
mod config;
mod external;
mod szs;
mod unify;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

pub use builtin::{builtin_prove, builtin_prove_problem, Limits};
pub use config::{BackendConfig, ConfigError};
pub use external::run_external;
pub use szs::parse_szs;
pub use unify::{apply, unify, unify_args};

use crate::syntax::{AnnotatedStatement, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Proved,
    Refuted,
    Unknown,
    Timeout,
    BackendError,
    NotAttempted,
}

impl Status {
    pub const ALL: [Status; 6] = [
        Status::Proved,
        Status::Refuted,
        Status::Unknown,
        Status::Timeout,
        Status::BackendError,
        Status::NotAttempted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Proved => "Proved",
            Status::Refuted => "Refuted",
            Status::Unknown => "Unknown",
            Status::Timeout => "Timeout",
            Status::BackendError => "BackendError",
            Status::NotAttempted => "NotAttempted",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Status::ALL.into_iter().find(|v| v.as_str() == s).ok_or(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub szs_word: Option<String>,
    /// Raw prover output, or the built-in prover's refutation in TSTP form.
    pub derivation_text: Option<String>,
    pub wall_seconds: f64,
    /// Input statements the built-in prover's refutation depends on.
    pub used_premises: Vec<String>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn new(status: Status) -> Self {
        Verdict {
            status,
            szs_word: None,
            derivation_text: None,
            wall_seconds: 0.0,
            used_premises: Vec::new(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_proved(&self) -> bool {
        self.status == Status::Proved
    }
}

/// One conjecture and the premises it may use.
#[derive(Clone, Copy, Debug)]
pub struct Problem<'a> {
    pub name: &'a str,
    pub premises: &'a [AnnotatedStatement],
    pub conjecture: &'a AnnotatedStatement,
}

impl Problem<'_> {
    /// Self-contained TPTP text: premises as axioms, then the conjecture.
    pub fn to_tptp(&self) -> String {
        let mut out = format!("% task {}\n", self.name);
        for p in self.premises {
            let mut s = p.with_role(Role::Axiom);
            s.source = None;
            out.push_str(&format!("{s}\n"));
        }
        let mut c = self.conjecture.with_role(Role::Conjecture);
        c.source = None;
        out.push_str(&format!("{c}\n"));
        out
    }
}

pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn prove(&self, problem: &Problem<'_>, timeout: Duration) -> Verdict;
}

/// The built-in resolution prover.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub max_clauses: usize,
}

impl Default for Builtin {
    fn default() -> Self {
        Builtin { max_clauses: 20_000 }
    }
}

impl Backend for Builtin {
    fn name(&self) -> &str {
        "builtin"
    }

    fn prove(&self, problem: &Problem<'_>, timeout: Duration) -> Verdict {
        let limits = Limits {
            max_clauses: self.max_clauses,
            max_seconds: timeout.as_secs_f64(),
        };
        builtin_prove_problem(problem, &limits)
    }
}

/// An external prover driven by a [`BackendConfig`].
#[derive(Clone, Debug)]
pub struct External {
    pub config: BackendConfig,
}

impl Backend for External {
    fn name(&self) -> &str {
        &self.config.name
    }

    fn prove(&self, problem: &Problem<'_>, timeout: Duration) -> Verdict {
        let file = match tempfile::Builder::new().prefix(&format!("{}-", problem.name)).suffix(".p").tempfile() {
            Ok(f) => f,
            Err(e) => return Verdict::new(Status::BackendError).with_note(format!("cannot create task file: {e}")),
        };
        if let Err(e) = std::fs::write(file.path(), problem.to_tptp()) {
            return Verdict::new(Status::BackendError).with_note(format!("cannot write task file: {e}"));
        }
        run_external(file.path(), &self.config, timeout)
    }
}

/// Runs `problem` through `backend`, for callers holding a task file path.
pub fn prove_file(path: &Path, backend: &dyn Backend, timeout: Duration) -> Result<Verdict, crate::syntax::ParseError> {
    let script = crate::syntax::parse_script_file(path, None)?;
    let statements: Vec<AnnotatedStatement> = script.statements().cloned().collect();
    let (conj, premises): (Vec<_>, Vec<_>) = statements.into_iter().partition(|s| s.role == Role::Conjecture);
    let Some(conjecture) = conj.first() else {
        return Ok(Verdict::new(Status::BackendError).with_note("no conjecture in task file"));
    };
    let problem = Problem {
        name: &conjecture.name,
        premises: &premises,
        conjecture,
    };
    Ok(backend.prove(&problem, timeout))
}
