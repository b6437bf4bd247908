use std::collections::BTreeSet;
use std::path::Path;

/// How to run an external prover and read its SZS status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendConfig {
    pub name: String,
    /// Whitespace-separated argv with `{file}` and `{timeout}` placeholders.
    pub command_template: String,
    pub success_statuses: BTreeSet<String>,
    pub failure_statuses: BTreeSet<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no backend named `{0}`")]
    NoSuchBackend(String),
    #[error("backend `{0}`: command template lacks a {{file}} placeholder")]
    MissingFile(String),
}

pub const DEFAULT_SUCCESS: [&str; 2] = ["Theorem", "Unsatisfiable"];
pub const DEFAULT_FAILURE: [&str; 2] = ["CounterSatisfiable", "Satisfiable"];

fn words(s: &str) -> BTreeSet<String> {
    s.split([',', ' ']).filter(|w| !w.is_empty()).map(str::to_owned).collect()
}

impl BackendConfig {
    pub fn new(name: impl Into<String>, command_template: impl Into<String>) -> Result<Self, ConfigError> {
        let cfg = BackendConfig {
            name: name.into(),
            command_template: command_template.into(),
            success_statuses: DEFAULT_SUCCESS.iter().map(|s| s.to_string()).collect(),
            failure_statuses: DEFAULT_FAILURE.iter().map(|s| s.to_string()).collect(),
        };
        if !cfg.command_template.contains("{file}") {
            return Err(ConfigError::MissingFile(cfg.name));
        }
        Ok(cfg)
    }

    /// Documentation defaults; neither prover is required.
    pub fn eprover() -> Self {
        Self::new("eprover", "eprover --auto --cpu-limit={timeout} {file}").expect("has {file}")
    }

    pub fn vampire() -> Self {
        Self::new("vampire", "vampire --mode casc -t {timeout} {file}").expect("has {file}")
    }

    /// Substituted argv.
    pub fn argv(&self, file: &Path, timeout_secs: u64) -> Vec<String> {
        let file = file.to_string_lossy();
        self.command_template
            .split_whitespace()
            .map(|w| w.replace("{file}", &file).replace("{timeout}", &timeout_secs.to_string()))
            .collect()
    }

    /// Parses `name<TAB>template[<TAB>success[<TAB>failure]]` lines; `#`
    /// starts a comment line. Status lists are comma separated; omitted
    /// lists take the defaults.
    pub fn parse_file_text(text: &str) -> Result<Vec<BackendConfig>, ConfigError> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: &str| ConfigError::Line {
                line: i + 1,
                message: message.to_owned(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || fields.len() > 4 {
                return Err(err("expected name<TAB>template<TAB>success<TAB>failure"));
            }
            let mut cfg = BackendConfig::new(fields[0].trim(), fields[1].trim()).map_err(|e| err(&e.to_string()))?;
            if let Some(s) = fields.get(2).filter(|s| !s.trim().is_empty()) {
                cfg.success_statuses = words(s);
            }
            if let Some(s) = fields.get(3).filter(|s| !s.trim().is_empty()) {
                cfg.failure_statuses = words(s);
            }
            out.push(cfg);
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Vec<BackendConfig>, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_file_text(&text)
    }
}
