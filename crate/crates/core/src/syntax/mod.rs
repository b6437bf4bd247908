//! TPTP FOF + TPI surface syntax: AST, packrat parser, printer, and the
//! alternative-order guard.

pub mod ast;
mod error;
pub mod grammar;
pub mod lex;
mod parser;
mod printer;
pub mod reference;

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

pub use ast::*;
pub use error::ParseError;
pub use grammar::{Alternative, Grammar, RuleId};
pub use parser::{Coverage, ParseOptions, Parser};
pub use printer::print_statement;

/// Parses top-level items without resolving includes.
pub fn parse_items(text: &str, opts: ParseOptions) -> Result<Vec<RawItem>, ParseError> {
    let grammar = Grammar::tptp();
    Parser::new(text, &grammar, opts).items()
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let grammar = Grammar::tptp();
    Parser::new(text, &grammar, ParseOptions::default()).whole_formula()
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let grammar = Grammar::tptp();
    Parser::new(text, &grammar, ParseOptions::default()).whole_term()
}

/// Parses annotation text (`source[, useful_info]`) into general terms.
pub fn parse_annotation(text: &str) -> Result<Vec<GeneralTerm>, ParseError> {
    let grammar = Grammar::tptp();
    Parser::new(text, &grammar, ParseOptions::default()).whole_general_terms()
}

/// Parses a proof script, splicing `include('path').` files found under
/// `include_base`.
pub fn parse_script(text: &str, include_base: &Path) -> Result<ProofScript, ParseError> {
    let mut items = Vec::new();
    splice(text, include_base, &mut Vec::new(), &mut items)?;
    finish(items)
}

/// Reads and parses `path`; includes resolve under `include_base`, or the
/// file's own directory when `None`.
pub fn parse_script_file(path: &Path, include_base: Option<&Path>) -> Result<ProofScript, ParseError> {
    let text = fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.to_owned(),
        source,
    })?;
    let base = match include_base {
        Some(b) => b.to_owned(),
        None => path.parent().map(Path::to_owned).unwrap_or_default(),
    };
    let root = path.canonicalize().unwrap_or_else(|_| path.to_owned());
    let mut items = Vec::new();
    splice(&text, &base, &mut vec![root], &mut items).map_err(|e| in_file(path, e))?;
    finish(items)
}

fn in_file(path: &Path, e: ParseError) -> ParseError {
    match e {
        e @ (ParseError::InFile { .. }
        | ParseError::IncludeCycle { .. }
        | ParseError::MissingInclude { .. }
        | ParseError::Io { .. }) => e,
        e => ParseError::InFile {
            file: path.to_owned(),
            source: Box::new(e),
        },
    }
}

fn splice(
    text: &str,
    base: &Path,
    stack: &mut Vec<PathBuf>,
    out: &mut Vec<ScriptItem>,
) -> Result<(), ParseError> {
    for item in parse_items(text, ParseOptions::default())? {
        match item {
            RawItem::Statement(s) => out.push(ScriptItem::Statement(s)),
            RawItem::Tpi(t) => out.push(ScriptItem::Tpi(t)),
            RawItem::Include(rel) => {
                let path = base.join(&rel);
                let canon = path
                    .canonicalize()
                    .map_err(|_| ParseError::MissingInclude { path: path.clone() })?;
                if stack.contains(&canon) {
                    let mut chain = stack.clone();
                    chain.push(canon);
                    return Err(ParseError::IncludeCycle { chain });
                }
                let text = fs::read_to_string(&canon).map_err(|source| ParseError::Io {
                    path: canon.clone(),
                    source,
                })?;
                stack.push(canon);
                splice(&text, base, stack, out).map_err(|e| in_file(&path, e))?;
                stack.pop();
            }
        }
    }
    Ok(())
}

fn finish(items: Vec<ScriptItem>) -> Result<ProofScript, ParseError> {
    let mut seen = HashMap::new();
    for item in &items {
        if seen.insert(item.name().to_owned(), ()).is_some() {
            let span = item.span().unwrap_or_default();
            return Err(ParseError::DuplicateName {
                name: item.name().to_owned(),
                line: span.start_line,
                column: span.start_col,
            });
        }
    }
    Ok(ProofScript { items })
}

// ---- alternative-order guard ----

#[derive(Clone, Debug)]
pub struct CorpusFile {
    pub name: String,
    pub text: String,
    /// Parse as prover output (`cnf` allowed).
    pub derivation: bool,
}

impl CorpusFile {
    pub fn script(name: impl Into<String>, text: impl Into<String>) -> Self {
        CorpusFile {
            name: name.into(),
            text: text.into(),
            derivation: false,
        }
    }
}

/// An earlier alternative whose language is a strict prefix of a later one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedAlternative {
    pub rule: RuleId,
    pub earlier: &'static str,
    pub later: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayIssue {
    /// The packrat parser rejected a file the backtracking parser accepts.
    PackratRejected { file: String, message: String },
    /// Both parsers accept but disagree on the AST.
    Mismatch { file: String },
    /// The backtracking parser found more than one complete parse.
    Ambiguous { file: String, parses: usize },
    /// Neither parser accepts the file.
    Rejected { file: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternativeUse {
    pub rule: RuleId,
    pub label: &'static str,
    pub uses: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrderReport {
    pub masked: Vec<MaskedAlternative>,
    pub replay: Vec<ReplayIssue>,
    /// Per-alternative success counts over the corpus; empty for an empty corpus.
    pub coverage: Vec<AlternativeUse>,
    pub files: usize,
}

impl OrderReport {
    pub fn is_clean(&self) -> bool {
        self.masked.is_empty() && self.replay.is_empty()
    }

    pub fn unexercised(&self) -> impl Iterator<Item = &AlternativeUse> {
        self.coverage.iter().filter(|u| u.uses == 0)
    }
}

impl fmt::Display for OrderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.masked {
            writeln!(f, "masked\t{}\t{} before {}", m.rule, m.earlier, m.later)?;
        }
        for r in &self.replay {
            match r {
                ReplayIssue::PackratRejected { file, message } => {
                    writeln!(f, "packrat-rejected\t{file}\t{message}")?
                }
                ReplayIssue::Mismatch { file } => writeln!(f, "mismatch\t{file}")?,
                ReplayIssue::Ambiguous { file, parses } => {
                    writeln!(f, "ambiguous\t{file}\t{parses} parses")?
                }
                ReplayIssue::Rejected { file, message } => writeln!(f, "rejected\t{file}\t{message}")?,
            }
        }
        for u in &self.coverage {
            writeln!(f, "coverage\t{}\t{}\t{}", u.rule, u.label, u.uses)?;
        }
        Ok(())
    }
}

/// Checks `grammar`'s alternative order statically for prefix masking and
/// dynamically by replaying `corpus` against the backtracking parser.
pub fn grammar_order_check(grammar: &Grammar, corpus: &[CorpusFile]) -> OrderReport {
    let mut report = OrderReport::default();
    for rule in grammar.rules() {
        for (i, earlier) in rule.alternatives.iter().enumerate() {
            for later in &rule.alternatives[i + 1..] {
                if earlier.prefix_subsumes(later) {
                    report.masked.push(MaskedAlternative {
                        rule: rule.id,
                        earlier: earlier.label,
                        later: later.label,
                    });
                }
            }
        }
    }
    if corpus.is_empty() {
        return report;
    }
    let mut coverage = Coverage::new();
    for file in corpus {
        report.files += 1;
        let opts = ParseOptions {
            allow_cnf: file.derivation,
        };
        let text = if file.derivation {
            split_tstp(&file.text).joined()
        } else {
            file.text.clone()
        };
        let mut packrat = Parser::new(&text, grammar, opts);
        let fast = packrat.items();
        for (k, n) in packrat.coverage() {
            *coverage.entry(*k).or_default() += n;
        }
        let slow = reference::Backtracking::new(&text, file.derivation).all_parses();
        let name = file.name.clone();
        match (fast, slow.len()) {
            (Ok(_), n) if n > 1 => report.replay.push(ReplayIssue::Ambiguous { file: name, parses: n }),
            (Ok(items), 1) => {
                if items != slow[0] {
                    report.replay.push(ReplayIssue::Mismatch { file: name });
                }
            }
            (Ok(_), _) => report.replay.push(ReplayIssue::Mismatch { file: name }),
            (Err(e), 0) => report.replay.push(ReplayIssue::Rejected {
                file: name,
                message: e.to_string(),
            }),
            (Err(e), _) => report.replay.push(ReplayIssue::PackratRejected {
                file: name,
                message: e.to_string(),
            }),
        }
    }
    for rule in grammar.rules() {
        for alt in &rule.alternatives {
            report.coverage.push(AlternativeUse {
                rule: rule.id,
                label: alt.label,
                uses: coverage.get(&(rule.id, alt.label)).copied().unwrap_or(0),
            });
        }
    }
    report
}

/// Statement text extracted from raw prover output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TstpChunks {
    /// Each chunk holds one or more complete `fof`/`cnf` statements.
    pub chunks: Vec<String>,
    /// Non-blank, non-comment lines outside statements.
    pub skipped: usize,
}

impl TstpChunks {
    pub fn joined(&self) -> String {
        self.chunks.join("\n")
    }
}

/// Separates `fof(...)`/`cnf(...)` statements from the chatter that provers
/// print around them (`# Proof found!`, SZS lines, timing info).
pub fn split_tstp(text: &str) -> TstpChunks {
    let mut out = TstpChunks::default();
    let mut current: Option<String> = None;
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(buf) = current.as_mut() {
            buf.push('\n');
            buf.push_str(line);
        } else if starts_statement(trimmed) {
            current = Some(line.to_owned());
        } else {
            if !(trimmed.is_empty() || trimmed.starts_with('%')) {
                out.skipped += 1;
            }
            continue;
        }
        if current.as_deref().is_some_and(|b| b.trim_end().ends_with(").")) {
            out.chunks.extend(current.take());
        }
    }
    if let Some(rest) = current {
        out.chunks.push(rest);
    }
    out
}

fn starts_statement(line: &str) -> bool {
    ["fof", "cnf"].iter().any(|kw| {
        line.strip_prefix(kw)
            .is_some_and(|rest| rest.trim_start().starts_with('('))
    })
}
