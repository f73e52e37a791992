//! The `.es` text format and graph-description export.
//!
//! ```text
//! es v1
//! # Example: a;b in conflict with c
//! event 0 a
//! event 1 b
//! event 2 c
//! cause 0 1
//! conflict 0 2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::label::Label;
use crate::semantics::Lts;
use crate::structure::{BuildError, EventId, EventStructure};

pub const HEADER: &str = "es v1";

#[derive(Debug, Error)]
pub enum EsFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Build { line: usize, source: BuildError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EsFileError {
    pub fn line(&self) -> Option<usize> {
        match self {
            EsFileError::Parse { line, .. } | EsFileError::Build { line, .. } => Some(*line),
            EsFileError::Io(_) => None,
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> EsFileError {
    EsFileError::Parse { line, message: message.into() }
}

enum Relation {
    Cause,
    Conflict,
}

pub fn parse_es(text: &str) -> Result<EventStructure, EsFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, l)) if l.split_whitespace().eq(HEADER.split_whitespace()) => {}
        Some((n, l)) => return Err(parse_error(n, format!("expected header `{HEADER}`, found `{l}`"))),
        None => return Err(parse_error(1, format!("missing header `{HEADER}`"))),
    }

    let mut events: BTreeMap<u64, (usize, Label)> = BTreeMap::new();
    let mut relations: Vec<(usize, Relation, u64, u64)> = Vec::new();
    for (n, line) in lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        let id = |w: &str| w.parse::<u64>().map_err(|_| parse_error(n, format!("`{w}` is not an event id")));
        match words.as_slice() {
            ["event", i, label] => {
                let i = id(i)?;
                if events.insert(i, (n, Label::new(label))).is_some() {
                    return Err(parse_error(n, format!("event {i} declared twice")));
                }
            }
            [kind @ ("cause" | "conflict"), a, b] => {
                let (a, b) = (id(a)?, id(b)?);
                for x in [a, b] {
                    if !events.contains_key(&x) {
                        return Err(parse_error(n, format!("event {x} used before its declaration")));
                    }
                }
                let rel = if *kind == "cause" { Relation::Cause } else { Relation::Conflict };
                relations.push((n, rel, a, b));
            }
            [word, ..] if ["event", "cause", "conflict"].contains(word) => {
                return Err(parse_error(n, format!("`{word}` takes two arguments")));
            }
            [word, ..] => return Err(parse_error(n, format!("unknown directive `{word}`"))),
            [] => unreachable!(),
        }
    }

    let dense: BTreeMap<u64, EventId> = events.keys().enumerate().map(|(i, &k)| (k, i)).collect();
    let labels: Vec<Label> = events.values().map(|(_, l)| l.clone()).collect();
    let build = |upto: usize| {
        let (mut causes, mut conflicts) = (Vec::new(), Vec::new());
        for (_, rel, a, b) in &relations[..upto] {
            let pair = (dense[a], dense[b]);
            match rel {
                Relation::Cause => causes.push(pair),
                Relation::Conflict => conflicts.push(pair),
            }
        }
        EventStructure::build(labels.len(), labels.clone(), &causes, &conflicts)
    };
    match build(relations.len()) {
        Ok(s) => Ok(s),
        Err(err) => {
            // Blame the first relation line whose prefix already fails.
            let line = (1..=relations.len())
                .find(|&k| build(k).is_err())
                .map(|k| relations[k - 1].0)
                .or_else(|| events.values().last().map(|(n, _)| *n))
                .unwrap_or(1);
            Err(EsFileError::Build { line, source: err })
        }
    }
}

pub fn read_es(path: impl AsRef<Path>) -> Result<EventStructure, EsFileError> {
    parse_es(&std::fs::read_to_string(path)?)
}

/// Causality as its transitive reduction and conflict as its minimal pairs.
pub fn format_es(s: &EventStructure) -> String {
    let mut out = format!("{HEADER}\n");
    for e in s.events() {
        let _ = writeln!(out, "event {e} {}", s.label(e));
    }
    for (a, b) in s.hasse() {
        let _ = writeln!(out, "cause {a} {b}");
    }
    for (a, b) in s.minimal_conflicts() {
        let _ = writeln!(out, "conflict {a} {b}");
    }
    out
}

pub fn write_es(s: &EventStructure, path: impl AsRef<Path>) -> Result<(), EsFileError> {
    std::fs::write(path, format_es(s))?;
    Ok(())
}

fn quoted(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram: solid causality edges, dashed undirected minimal conflicts.
pub fn structure_dot(s: &EventStructure) -> String {
    let mut out = String::from("digraph es {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for e in s.events() {
        let _ = writeln!(out, "  e{e} [label={}];", quoted(&format!("e{e}:{}", s.label(e))));
    }
    for (a, b) in s.hasse() {
        let _ = writeln!(out, "  e{a} -> e{b};");
    }
    for (a, b) in s.minimal_conflicts() {
        let _ = writeln!(out, "  e{a} -> e{b} [style=dashed, dir=none, constraint=false];");
    }
    out.push_str("}\n");
    out
}

/// Configuration graph; nodes are keyed by configuration bitmask.
pub fn lts_dot(lts: &Lts) -> String {
    let mut out = format!("digraph lts {{\n  label={};\n  node [shape=box];\n", quoted(&lts.mode().to_string()));
    let mut states: Vec<_> = lts.states().to_vec();
    states.sort();
    for x in &states {
        let _ = writeln!(out, "  s{} [label={}];", x.mask(), quoted(&x.to_string()));
    }
    let mut edges: Vec<(u64, u64, String)> = lts
        .transitions()
        .iter()
        .map(|t| (lts.states()[t.source].mask(), lts.states()[t.target].mask(), t.action.to_string()))
        .collect();
    edges.sort();
    for (from, to, label) in edges {
        let _ = writeln!(out, "  s{from} -> s{to} [label={}];", quoted(&label));
    }
    out.push_str("}\n");
    out
}

pub enum DotSource<'a> {
    Structure(&'a EventStructure),
    Lts(&'a Lts),
}

pub fn export_dot(source: DotSource<'_>) -> String {
    match source {
        DotSource::Structure(s) => structure_dot(s),
        DotSource::Lts(l) => lts_dot(l),
    }
}
