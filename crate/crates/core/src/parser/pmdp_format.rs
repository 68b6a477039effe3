//! The line-oriented `.pmdp` model format.
//!
//! ```text
//! pmdp learner
//! param p in [0,1]
//! state s a b c t x
//! action e a b c
//! init s:1
//! target t
//! trans s e a:p, b:1-p
//! ```
//!
//! Declarations may appear in any order. `(state, action)` pairs without a
//! `trans` line get a probability-one self-loop. `#` starts a comment.

use std::fmt::Write as _;

use crate::error::{Error, Location, Result};
use crate::model::{Param, ParamExpr, Pmdp, SymbolicRow, PROB_TOLERANCE};
use crate::parser::ModelSource;

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedModel {
    pub pmdp: Pmdp,
    /// Index of the declared `target` state, if any.
    pub target: Option<usize>,
}

/// A token with its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    toks: Vec<Tok<'a>>,
    raw: &'a str,
}

fn column_of(raw: &str, byte: usize) -> usize {
    raw[..byte].chars().count() + 1
}

fn byte_of(raw: &str, column: usize) -> usize {
    raw.char_indices().nth(column - 1).map_or(raw.len(), |(b, _)| b)
}

fn tokenize(raw: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in raw.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { text: &raw[s..i], col: column_of(raw, s) });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &raw[s..], col: column_of(raw, s) });
    }
    out
}

struct Ctx<'a> {
    origin: &'a str,
}

impl Ctx<'_> {
    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            origin: self.origin.to_string(),
            location: Location { line, column },
            message: message.into(),
        }
    }
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '.' || c == '-')
}

fn valid_param_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Splits `rest` (starting at byte `base` of `raw`) on commas, yielding
/// `(text, byte offset)` pieces with surrounding whitespace trimmed.
fn split_entries(rest: &str, base: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in rest.char_indices().chain(std::iter::once((rest.len(), ','))) {
        if c == ',' {
            let piece = &rest[start..i];
            let lead = piece.len() - piece.trim_start().len();
            out.push((piece.trim(), base + start + lead));
            start = i + 1;
        }
    }
    out
}

fn const_value(ctx: &Ctx, line: usize, col: usize, text: &str) -> Result<f64> {
    let e = ParamExpr::parse(text).map_err(|(off, msg)| ctx.err(line, col + off, msg))?;
    e.eval(&[]).map_err(|e| ctx.err(line, col, format!("expected a constant: {e}")))
}

pub fn parse_pmdp(src: &ModelSource) -> Result<ParsedModel> {
    let ctx = Ctx { origin: &src.origin };
    let lines: Vec<Line> = src
        .text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let raw = raw.split('#').next().unwrap_or("");
            Line { number: i + 1, toks: tokenize(raw), raw }
        })
        .filter(|l| !l.toks.is_empty())
        .collect();

    let mut name: Option<String> = None;
    let mut states: Vec<String> = Vec::new();
    let mut actions: Vec<String> = Vec::new();
    let mut params: Vec<Param> = Vec::new();

    // Pass 1: declarations.
    for l in &lines {
        let kw = l.toks[0];
        match kw.text {
            "pmdp" => {
                let t = l.toks.get(1).ok_or_else(|| ctx.err(l.number, kw.col, "expected model name"))?;
                if name.is_some() {
                    return Err(ctx.err(l.number, kw.col, "duplicate `pmdp` line"));
                }
                name = Some(t.text.to_string());
            }
            "state" | "action" => {
                let (list, what) = if kw.text == "state" { (&mut states, "state") } else { (&mut actions, "action") };
                if l.toks.len() < 2 {
                    return Err(ctx.err(l.number, kw.col, format!("expected {what} name")));
                }
                for t in &l.toks[1..] {
                    if !valid_name(t.text) {
                        return Err(ctx.err(l.number, t.col, format!("invalid {what} name `{}`", t.text)));
                    }
                    if list.iter().any(|s| s == t.text) {
                        return Err(ctx.err(l.number, t.col, format!("duplicate {what} `{}`", t.text)));
                    }
                    list.push(t.text.to_string());
                }
            }
            "param" => {
                let t = l.toks.get(1).ok_or_else(|| ctx.err(l.number, kw.col, "expected parameter name"))?;
                if !valid_param_name(t.text) {
                    return Err(ctx.err(l.number, t.col, format!("invalid parameter name `{}`", t.text)));
                }
                if params.iter().any(|p| p.name == t.text) {
                    return Err(ctx.err(l.number, t.col, format!("duplicate parameter `{}`", t.text)));
                }
                let mut param = Param::unit(t.text);
                if let Some(in_kw) = l.toks.get(2) {
                    if in_kw.text != "in" {
                        return Err(ctx.err(l.number, in_kw.col, "expected `in [lo,hi]`"));
                    }
                    let start = byte_of(l.raw, in_kw.col) + in_kw.text.len();
                    let body = l.raw[start..].trim();
                    let col = column_of(l.raw, l.raw.len() - l.raw[start..].trim_start().len());
                    let inner = body
                        .strip_prefix('[')
                        .and_then(|b| b.strip_suffix(']'))
                        .ok_or_else(|| ctx.err(l.number, col, "expected `[lo,hi]`"))?;
                    let (lo, hi) = inner
                        .split_once(',')
                        .ok_or_else(|| ctx.err(l.number, col, "expected `[lo,hi]`"))?;
                    param.lower = const_value(&ctx, l.number, col + 1, lo.trim())?;
                    param.upper = const_value(&ctx, l.number, col + 1, hi.trim())?;
                    if param.lower > param.upper {
                        return Err(ctx.err(l.number, col, "empty parameter interval"));
                    }
                }
                params.push(param);
            }
            "init" | "target" | "trans" => {}
            other => return Err(ctx.err(l.number, kw.col, format!("unknown keyword `{other}`"))),
        }
    }

    let state_of = |l: &Line, t: &Tok| -> Result<usize> {
        states
            .iter()
            .position(|s| s == t.text)
            .ok_or_else(|| ctx.err(l.number, t.col, format!("undeclared state `{}`", t.text)))
    };

    let na = actions.len();
    let mut rows: Vec<Option<SymbolicRow>> = vec![None; states.len() * na];
    let mut init = vec![0.0; states.len()];
    let mut saw_init = false;
    let mut target = None;

    // Pass 2: init, target and transitions.
    for l in &lines {
        let kw = l.toks[0];
        match kw.text {
            "init" => {
                saw_init = true;
                let base = byte_of(l.raw, kw.col) + kw.text.len();
                for (piece, off) in split_entries(&l.raw[base..], base).into_iter().flat_map(|(p, off)| {
                    // Entries may also be separated by whitespace.
                    let mut v = Vec::new();
                    let mut cursor = 0;
                    for t in p.split_whitespace() {
                        let at = p[cursor..].find(t).map(|i| i + cursor).unwrap_or(0);
                        v.push((t, off + at));
                        cursor = at + t.len();
                    }
                    v
                }) {
                    let col = column_of(l.raw, off);
                    let (s, p) = piece
                        .split_once(':')
                        .ok_or_else(|| ctx.err(l.number, col, "expected `state:probability`"))?;
                    let s_idx = state_of(l, &Tok { text: s, col })?;
                    init[s_idx] += const_value(&ctx, l.number, col + s.chars().count() + 1, p)?;
                }
            }
            "target" => {
                let t = l.toks.get(1).ok_or_else(|| ctx.err(l.number, kw.col, "expected target state"))?;
                if target.is_some() {
                    return Err(ctx.err(l.number, kw.col, "duplicate `target` line"));
                }
                target = Some(state_of(l, t)?);
            }
            "trans" => {
                if l.toks.len() < 4 {
                    return Err(ctx.err(l.number, kw.col, "expected `trans <state> <action> <target>:<expr>, ...`"));
                }
                let s = state_of(l, &l.toks[1])?;
                let at = l.toks[2];
                let a = actions
                    .iter()
                    .position(|x| x == at.text)
                    .ok_or_else(|| ctx.err(l.number, at.col, format!("undeclared action `{}`", at.text)))?;
                if rows[s * na + a].is_some() {
                    return Err(ctx.err(l.number, kw.col, format!("duplicate transition row ({}, {})", states[s], actions[a])));
                }
                let base = byte_of(l.raw, l.toks[3].col);
                let mut row: SymbolicRow = Vec::new();
                for (piece, off) in split_entries(&l.raw[base..], base) {
                    let col = column_of(l.raw, off);
                    let (t, e) = piece
                        .split_once(':')
                        .ok_or_else(|| ctx.err(l.number, col, "expected `<target>:<expr>`"))?;
                    let t_name = t.trim();
                    let t_idx = state_of(l, &Tok { text: t_name, col })?;
                    if row.iter().any(|(u, _)| *u == t_idx) {
                        return Err(ctx.err(l.number, col, format!("duplicate target `{t_name}` in row")));
                    }
                    let e_col = col + t.chars().count() + 1;
                    let expr = ParamExpr::parse(e).map_err(|(o, msg)| ctx.err(l.number, e_col + o, msg))?;
                    if let Some(p) = expr.params().into_iter().find(|p| !params.iter().any(|q| q.name == *p)) {
                        return Err(ctx.err(l.number, e_col, format!("undeclared parameter `{p}`")));
                    }
                    row.push((t_idx, expr));
                }
                rows[s * na + a] = Some(row);
            }
            _ => {}
        }
    }

    if states.is_empty() {
        return Err(ctx.err(1, 1, "model declares no states"));
    }
    if actions.is_empty() {
        return Err(ctx.err(1, 1, "model declares no actions"));
    }
    if !saw_init {
        return Err(ctx.err(1, 1, "missing `init` line"));
    }
    let total: f64 = init.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE || init.iter().any(|p| *p < 0.0) {
        let line = lines.iter().find(|l| l.toks[0].text == "init").map_or(1, |l| l.number);
        return Err(ctx.err(line, 1, format!("initial distribution sums to {total}")));
    }

    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(idx, r)| r.unwrap_or_else(|| vec![(idx / na, ParamExpr::Const(1.0))]))
        .collect();
    let name = name.unwrap_or_else(|| "model".to_string());
    Ok(ParsedModel {
        pmdp: Pmdp {
            name,
            states,
            actions,
            params,
            rows,
            init,
        },
        target,
    })
}

/// Writes `m` in the `.pmdp` format. Self-loop rows are omitted since the
/// parser restores them.
pub fn write_pmdp(m: &Pmdp, target: Option<usize>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pmdp {}", m.name);
    for p in &m.params {
        let _ = writeln!(out, "param {} in [{},{}]", p.name, p.lower, p.upper);
    }
    let _ = writeln!(out, "state {}", m.states.join(" "));
    let _ = writeln!(out, "action {}", m.actions.join(" "));
    let init: Vec<String> = m
        .init
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != 0.0)
        .map(|(s, p)| format!("{}:{p}", m.states[s]))
        .collect();
    let _ = writeln!(out, "init {}", init.join(" "));
    if let Some(t) = target {
        let _ = writeln!(out, "target {}", m.states[t]);
    }
    let na = m.num_actions();
    for (idx, row) in m.rows.iter().enumerate() {
        let s = idx / na;
        if row.len() == 1 && row[0].0 == s && row[0].1 == ParamExpr::Const(1.0) {
            continue;
        }
        let entries: Vec<String> = row.iter().map(|(t, e)| format!("{}:{e}", m.states[*t])).collect();
        let _ = writeln!(out, "trans {} {} {}", m.states[s], m.actions[idx % na], entries.join(", "));
    }
    out
}
