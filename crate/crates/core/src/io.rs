//! Text instance format.
//!
//! ```text
//! c comment
//! p tct <n> <mode>          mode is mct, gmwct or wgmwct
//! e <u> <v> [<cost>]        exactly n-1 lines; cost only (and always) in wgmwct
//! q <u> <v>                 requests, mct only
//! t <i> <u1> <u2> ...       terminal set i (1..q), gmwct and wgmwct only
//! k <int>                   optional budget
//! ```
//!
//! Vertex ids are 1..n in files and 0..n-1 in memory.

use thiserror::Error;

use crate::model::{build_instance, CutSet, Demands, Instance, InstanceError, Mode, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid instance: {0}")]
    Validation(#[from] InstanceError),
}

fn err(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError { line, reason: reason.into() }
}

fn number<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| err(line, format!("bad {what} `{tok}`")))
}

fn vertex(line: usize, tok: Option<&str>, n: usize) -> Result<VertexId, ParseError> {
    let v: usize = number(line, tok, "vertex id")?;
    if v == 0 || v > n {
        return Err(err(line, format!("vertex id {v} outside 1..{n}")));
    }
    Ok(v - 1)
}

pub fn parse_instance(text: &str) -> Result<Instance, FileError> {
    let mut header: Option<(usize, Mode)> = None;
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    let mut requests = Vec::new();
    let mut sets: Vec<(usize, usize, Vec<VertexId>)> = Vec::new();
    let mut k = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        if tag == "c" {
            continue;
        }
        if tag == "p" {
            if header.is_some() {
                return Err(err(line, "second header line").into());
            }
            if toks.next() != Some("tct") {
                return Err(err(line, "header must read `p tct <n> <mode>`").into());
            }
            let n: usize = number(line, toks.next(), "vertex count")?;
            if n == 0 {
                return Err(err(line, "vertex count must be positive").into());
            }
            let mode_tok = toks.next().ok_or_else(|| err(line, "missing mode"))?;
            let mode: Mode = mode_tok.parse().map_err(|e: String| err(line, e))?;
            header = Some((n, mode));
        } else {
            let Some((n, mode)) = header else {
                return Err(err(line, format!("`{tag}` line before the header")).into());
            };
            match tag {
                "e" => {
                    let a = vertex(line, toks.next(), n)?;
                    let b = vertex(line, toks.next(), n)?;
                    match (toks.next(), mode) {
                        (Some(c), Mode::Wgmwct) => costs.push(number(line, Some(c), "cost")?),
                        (None, Mode::Wgmwct) => return Err(err(line, "wgmwct edges need a cost").into()),
                        (Some(_), _) => {
                            return Err(err(line, format!("edge cost in {} mode", mode.as_str())).into())
                        }
                        (None, _) => {}
                    }
                    edges.push((a, b));
                }
                "q" => {
                    if mode != Mode::Mct {
                        return Err(err(line, format!("request in {} mode", mode.as_str())).into());
                    }
                    let a = vertex(line, toks.next(), n)?;
                    let b = vertex(line, toks.next(), n)?;
                    requests.push((a, b));
                }
                "t" => {
                    if mode == Mode::Mct {
                        return Err(err(line, "terminal set in mct mode").into());
                    }
                    let idx: usize = number(line, toks.next(), "set index")?;
                    let mut members = Vec::new();
                    for tok in toks.by_ref() {
                        members.push(vertex(line, Some(tok), n)?);
                    }
                    sets.push((idx, line, members));
                }
                "k" => {
                    if k.is_some() {
                        return Err(err(line, "second `k` line").into());
                    }
                    k = Some(number(line, toks.next(), "budget")?);
                }
                other => return Err(err(line, format!("unknown line type `{other}`")).into()),
            }
        }
        if let Some(extra) = toks.next() {
            return Err(err(line, format!("unexpected token `{extra}`")).into());
        }
    }
    let (n, mode) = header.ok_or_else(|| err(text.lines().count().max(1), "missing header"))?;
    let demands = if mode == Mode::Mct {
        Demands::Requests(requests)
    } else {
        sets.sort_by_key(|s| s.0);
        for (pos, (idx, line, _)) in sets.iter().enumerate() {
            if *idx != pos + 1 {
                return Err(err(*line, format!("terminal set indices must run 1..q, found {idx}")).into());
            }
        }
        Demands::TerminalSets(sets.into_iter().map(|s| s.2).collect())
    };
    let costs = (mode == Mode::Wgmwct).then_some(costs);
    Ok(build_instance(n, edges, costs, demands, k)?)
}

pub fn write_instance(instance: &Instance) -> String {
    let mode = instance.mode();
    let mut out = format!("p tct {} {}\n", instance.n(), mode.as_str());
    for (i, &(a, b)) in instance.edges().iter().enumerate() {
        match instance.costs() {
            Some(c) => out.push_str(&format!("e {} {} {}\n", a + 1, b + 1, c[i])),
            None => out.push_str(&format!("e {} {}\n", a + 1, b + 1)),
        }
    }
    match instance.terminal_sets() {
        Some(sets) => {
            for (i, s) in sets.iter().enumerate() {
                let members: Vec<String> = s.iter().map(|v| (v + 1).to_string()).collect();
                out.push_str(&format!("t {} {}\n", i + 1, members.join(" ")));
            }
        }
        None => {
            for &(a, b) in instance.requests() {
                out.push_str(&format!("q {} {}\n", a + 1, b + 1));
            }
        }
    }
    if let Some(k) = instance.k() {
        out.push_str(&format!("k {k}\n"));
    }
    out
}

/// Cut files list one cut edge per line as `<u> <v>` (1-based), with
/// `c` comment lines allowed.
pub fn parse_cut(text: &str, instance: &Instance) -> Result<CutSet, ParseError> {
    let mut cut = CutSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        let Some(first) = toks.next() else { continue };
        if first == "c" {
            continue;
        }
        let a = vertex(line, Some(first), instance.n())?;
        let b = vertex(line, toks.next(), instance.n())?;
        if let Some(extra) = toks.next() {
            return Err(err(line, format!("unexpected token `{extra}`")));
        }
        let e = instance.find_edge(a, b).ok_or_else(|| err(line, format!("no edge {} {}", a + 1, b + 1)))?;
        cut.0.insert(e);
    }
    Ok(cut)
}

pub fn write_cut(cut: &CutSet, instance: &Instance) -> String {
    cut.iter()
        .map(|e| {
            let (a, b) = instance.edge(e);
            format!("{} {}\n", a + 1, b + 1)
        })
        .collect()
}
