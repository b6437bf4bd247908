use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::DerivationGraph;
use crate::syntax::Role;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotMode {
    /// Every inference step of one proof.
    Detail,
    /// Only input statements and the lemmas they feed.
    Overview,
}

impl std::str::FromStr for DotMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "detail" => Ok(DotMode::Detail),
            "overview" => Ok(DotMode::Overview),
            _ => Err(format!("unknown mode `{s}` (expected detail or overview)")),
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn to_dot(g: &DerivationGraph, mode: DotMode) -> String {
    match mode {
        DotMode::Detail => detail(g),
        DotMode::Overview => {
            let goal = g.conjecture().map(|n| n.original_name().to_owned()).unwrap_or_else(|| "goal".into());
            overview_dot(&BTreeMap::from([(goal, g.clone())]), None)
        }
    }
}

fn detail(g: &DerivationGraph) -> String {
    let mut out = String::from("digraph proof {\n");
    if !g.nodes.is_empty() {
        out.push_str("  node [shape=box];\n");
    }
    for n in &g.nodes {
        let label = format!("{}\n{}", n.name, n.rule);
        let style = if n.is_input() { ", style=bold" } else { "" };
        let _ = writeln!(out, "  {} [label={}{style}];", quote(&n.name), quote(&label));
    }
    for &(a, b) in &g.edges {
        let _ = writeln!(out, "  {} -> {};", quote(&g.nodes[a].name), quote(&g.nodes[b].name));
    }
    out.push('}');
    out.push('\n');
    out
}

/// Lemma dependence across tasks: an edge `L1 -> T` for every input `L1`
/// used by the derivation of task `T`. With `roles`, inputs are limited to
/// the statements it names (the pooled ones).
pub fn overview_dot(derivations: &BTreeMap<String, DerivationGraph>, roles: Option<&BTreeMap<String, Role>>) -> String {
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for (task, g) in derivations {
        nodes.insert(task.clone());
        for input in g.used_inputs() {
            let name = input.original_name();
            if roles.is_some_and(|r| !r.contains_key(name)) {
                continue;
            }
            nodes.insert(name.to_owned());
            if name != task {
                edges.insert((name.to_owned(), task.clone()));
            }
        }
    }
    let mut out = String::from("digraph proof {\n");
    if !nodes.is_empty() {
        out.push_str("  rankdir=BT;\n");
    }
    for n in &nodes {
        let shape = match roles.and_then(|r| r.get(n)) {
            Some(Role::CheckedLemma) => "box",
            Some(Role::CheckedDefinition | Role::Definition) => "note",
            Some(_) => "ellipse",
            None if derivations.contains_key(n) => "box",
            None => "ellipse",
        };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(n));
    }
    for (a, b) in &edges {
        let _ = writeln!(out, "  {} -> {};", quote(a), quote(b));
    }
    out.push('}');
    out.push('\n');
    out
}

/// Node and edge statements found by [`smoke_parse_dot`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DotSummary {
    pub directed: bool,
    pub node_statements: usize,
    pub edges: Vec<(String, String)>,
    /// Every node id mentioned anywhere.
    pub nodes: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Id(String),
    Punct(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c == '"' {
            it.next();
            let mut s = String::new();
            loop {
                match it.next() {
                    Some((_, '\\')) => match it.next() {
                        Some((_, e)) => {
                            s.push('\\');
                            s.push(e);
                        }
                        None => return Err("unterminated escape".into()),
                    },
                    Some((_, '"')) => break,
                    Some((_, ch)) => s.push(ch),
                    None => return Err(format!("unterminated string at byte {i}")),
                }
            }
            out.push(Tok::Id(unescape(&s)));
        } else if c == '-' && text[i..].starts_with("->") {
            it.next();
            it.next();
            out.push(Tok::Punct("->"));
        } else if let Some(p) = ["{", "}", "[", "]", ";", ",", "="].into_iter().find(|p| p.starts_with(c)) {
            it.next();
            out.push(Tok::Punct(p));
        } else if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let mut s = String::new();
            while let Some(&(_, ch)) = it.peek() {
                if ch.is_alphanumeric() || ch == '_' || ch == '.' || (ch == '-' && !text[i + s.len()..].starts_with("->")) {
                    s.push(ch);
                    it.next();
                } else {
                    break;
                }
            }
            out.push(Tok::Id(s));
        } else {
            return Err(format!("unexpected character {c:?} at byte {i}"));
        }
    }
    Ok(out)
}

fn unescape(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('"') => out.push('"'),
                Some('\\') => out.push('\\'),
                Some(o) => {
                    out.push('\\');
                    out.push(o);
                }
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

struct DotParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl DotParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), String> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(format!("expected `{p}` at token {}, found {:?}", self.pos, self.peek()))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!("expected identifier at token {}, found {other:?}", self.pos)),
        }
    }

    fn attr_lists(&mut self) -> Result<(), String> {
        while self.eat("[") {
            while !self.eat("]") {
                self.id()?;
                self.expect("=")?;
                self.id()?;
                if !self.eat(",") {
                    self.eat(";");
                }
            }
        }
        Ok(())
    }
}

/// A minimal DOT reader: `[strict] (di)graph [id] { stmt* }` with node, edge,
/// attribute and `id = id` statements. Subgraphs are not supported.
pub fn smoke_parse_dot(text: &str) -> Result<DotSummary, String> {
    let mut p = DotParser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let mut summary = DotSummary::default();
    let mut head = p.id()?;
    if head == "strict" {
        head = p.id()?;
    }
    summary.directed = match head.as_str() {
        "digraph" => true,
        "graph" => false,
        other => return Err(format!("expected graph or digraph, found `{other}`")),
    };
    if !p.eat("{") {
        p.id()?;
        p.expect("{")?;
    }
    loop {
        if p.eat("}") {
            break;
        }
        if p.eat(";") {
            continue;
        }
        let first = p.id()?;
        if matches!(first.as_str(), "graph" | "node" | "edge") && p.peek() == Some(&Tok::Punct("[")) {
            p.attr_lists()?;
        } else if p.eat("=") {
            p.id()?;
        } else if p.peek() == Some(&Tok::Punct("->")) {
            if !summary.directed {
                return Err("`->` in an undirected graph".into());
            }
            let mut from = first;
            summary.nodes.insert(from.clone());
            while p.eat("->") {
                let to = p.id()?;
                summary.nodes.insert(to.clone());
                summary.edges.push((from, to.clone()));
                from = to;
            }
            p.attr_lists()?;
        } else {
            summary.nodes.insert(first);
            summary.node_statements += 1;
            p.attr_lists()?;
        }
        p.eat(";");
    }
    if p.pos != p.toks.len() {
        return Err("trailing input after closing brace".into());
    }
    Ok(summary)
}
