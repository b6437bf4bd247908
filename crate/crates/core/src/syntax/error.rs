use std::io;
use std::path::PathBuf;

use thiserror::Error;

use super::ast::TpiVerb;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error, expected one of: {}", .expected.join(", "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
    },
    #[error("{line}:{column}: unknown role `{role}`")]
    UnknownRole {
        role: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: unknown TPI verb `{verb}` (supported: {})", supported_verbs())]
    UnknownVerb {
        verb: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: malformed `{verb}` payload: {message}")]
    MalformedPayload {
        verb: TpiVerb,
        message: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: duplicate statement name `{name}`")]
    DuplicateName {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: cnf statement `{name}` is only accepted in prover derivations")]
    CnfNotAllowed {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("include file not found: {}", .path.display())]
    MissingInclude { path: PathBuf },
    #[error("include cycle: {}", .chain.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(" -> "))]
    IncludeCycle { chain: Vec<PathBuf> },
    #[error("{}: {source}", .file.display())]
    InFile {
        file: PathBuf,
        #[source]
        source: Box<ParseError>,
    },
    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn supported_verbs() -> String {
    TpiVerb::ALL
        .iter()
        .map(|v| v.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

impl ParseError {
    /// Line and column of the innermost positioned error.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UnknownRole { line, column, .. }
            | ParseError::UnknownVerb { line, column, .. }
            | ParseError::MalformedPayload { line, column, .. }
            | ParseError::DuplicateName { line, column, .. }
            | ParseError::CnfNotAllowed { line, column, .. } => Some((*line, *column)),
            ParseError::InFile { source, .. } => source.position(),
            _ => None,
        }
    }
}
