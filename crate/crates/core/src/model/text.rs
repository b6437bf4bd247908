//! Line format:
//!
//! ```text
//! domain: t0 t1 a1 a2
//! fun active_state(t0,a1) = clearStealable
//! fun initial = t0
//! pred passed(t0,a1,a2) = false
//! ```
//!
//! `%` starts a comment. Unmentioned tuples stay undefined.

use std::str::FromStr;

use super::{ModelError, PartialModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ModelParseError {
    pub line: usize,
    pub message: String,
}

fn split_head(head: &str) -> Result<(&str, Vec<&str>), String> {
    let head = head.trim();
    match head.find('(') {
        None => Ok((head, Vec::new())),
        Some(open) => {
            let inner = head[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| format!("unbalanced parentheses in `{head}`"))?;
            let args = inner.split(',').map(str::trim).collect::<Vec<_>>();
            if args.iter().any(|a| a.is_empty()) {
                return Err(format!("empty argument in `{head}`"));
            }
            Ok((head[..open].trim(), args))
        }
    }
}

impl FromStr for PartialModel {
    type Err = ModelParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut model: Option<PartialModel> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| ModelParseError { line: line_no, message };
            let line = raw.split('%').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("domain:") {
                if model.is_some() {
                    return Err(err("domain declared twice".into()));
                }
                let m = PartialModel::new(rest.split_whitespace()).map_err(|e| err(e.to_string()))?;
                model = Some(m);
                continue;
            }
            let m = model.as_mut().ok_or_else(|| err("`domain:` must come first".into()))?;
            let (kind, rest) = line.split_once(char::is_whitespace).ok_or_else(|| err(format!("cannot read `{line}`")))?;
            let (head, value) = rest.split_once('=').ok_or_else(|| err("missing `=`".into()))?;
            let (name, args) = split_head(head).map_err(&err)?;
            if name.is_empty() {
                return Err(err("missing symbol name".into()));
            }
            let value = value.trim();
            let result: Result<(), ModelError> = match kind {
                "fun" => m.set_function_named(name, &args, value),
                "pred" => match value {
                    "true" => m.set_predicate_named(name, &args, true),
                    "false" => m.set_predicate_named(name, &args, false),
                    other => return Err(err(format!("predicate value must be true or false, got `{other}`"))),
                },
                other => return Err(err(format!("expected `fun` or `pred`, got `{other}`"))),
            };
            result.map_err(|e| err(e.to_string()))?;
        }
        model.ok_or(ModelParseError {
            line: 0,
            message: "no `domain:` line".into(),
        })
    }
}
