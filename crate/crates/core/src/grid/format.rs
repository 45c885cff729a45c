//! Plain-text grid files.
//!
//! ```text
//! # comment
//! n 3
//! 0 0
//! 1 0
//! ```
//!
//! The first non-comment line gives the exponent, every further line one
//! cell `k l`. [`write_grid`] emits cells sorted, so a write/parse/write
//! round trip is byte-identical.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{GridContinuum, GridError};

fn err(line: usize, column: usize, message: impl Into<String>) -> GridError {
    GridError::Parse { line, column, message: message.into() }
}

/// Splits a line into `(column, token)` pairs, 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &content[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &content[s..]));
    }
    out
}

pub fn parse_grid(text: &str) -> Result<GridContinuum, GridError> {
    let mut exponent: Option<u32> = None;
    let mut cells = BTreeSet::new();
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let ln = idx + 1;
        last_line = ln;
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        match exponent {
            None => {
                let [(c0, kw), (c1, value)] = toks[..] else {
                    return Err(err(ln, toks[0].0, "expected header `n <exponent>`"));
                };
                if kw != "n" {
                    return Err(err(ln, c0, format!("expected `n`, found `{kw}`")));
                }
                let e: u32 = value.parse().map_err(|_| err(ln, c1, format!("invalid exponent `{value}`")))?;
                if e > super::MAX_DEPTH {
                    return Err(err(ln, c1, format!("exponent {e} exceeds the depth limit {}", super::MAX_DEPTH)));
                }
                exponent = Some(e);
            }
            Some(_) => {
                if toks.len() != 2 {
                    let col = toks.get(2).map_or(line.len() + 1, |t| t.0);
                    return Err(err(ln, col, format!("expected two cell indices, found {}", toks.len())));
                }
                let mut idx = [0i64; 2];
                for (slot, &(col, tok)) in idx.iter_mut().zip(&toks) {
                    *slot = tok.parse().map_err(|_| err(ln, col, format!("invalid cell index `{tok}`")))?;
                }
                if !cells.insert((idx[0], idx[1])) {
                    return Err(err(ln, toks[0].0, format!("duplicate cell ({}, {})", idx[0], idx[1])));
                }
            }
        }
    }
    let exponent = exponent.ok_or_else(|| err(last_line.max(1), 1, "missing header `n <exponent>`"))?;
    if cells.is_empty() {
        return Err(err(last_line.max(1), 1, "grid has no cells"));
    }
    GridContinuum::new(exponent, cells).map_err(|e| err(last_line, 1, e.to_string()))
}

pub fn write_grid(g: &GridContinuum) -> String {
    let mut out = format!("n {}\n", g.exponent());
    for (k, l) in g.cells() {
        let _ = writeln!(out, "{k} {l}");
    }
    out
}
