//! The `.pomdp` exchange document.
//!
//! ```text
//! pomdp learner-induced
//! states 14
//! observations 7
//! actions 4
//! observation 0 s
//! state 0 s@0 0
//! action 0 e
//! init 0 5.0000000000000000e-1
//! trans 0 0 1 5.0000000000000000e-1
//! reward 3 1 12 1.0000000000000000e0
//! end
//! ```
//!
//! `state <index> <name> <observation>`, `trans <state> <action> <target>
//! <probability>` and `reward <state> <action> <target> <reward>` use
//! indices from the tables. Numbers carry 17 significant digits so that a
//! document re-reads to a bit-identical model.

use std::fmt::Write as _;

use crate::encoder::EncodingMap;
use crate::error::{Error, Location, Result};
use crate::model::{Mdp, Pomdp, RewardedMdp};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes `m`. When `encoding` is given, the header documents the
/// point-major state numbering.
pub fn serialize_pomdp(m: &Pomdp, encoding: Option<&EncodingMap>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# pomdp exchange document");
    if let Some(e) = encoding {
        let _ = writeln!(
            out,
            "# state index = point * {} + model state ({} points, point-major)",
            e.num_model_states, e.num_points
        );
    }
    let _ = writeln!(out, "pomdp {}", m.name);
    let _ = writeln!(out, "states {}", m.num_states());
    let _ = writeln!(out, "observations {}", m.num_observations());
    let _ = writeln!(out, "actions {}", m.num_actions());
    for (o, name) in m.observations.iter().enumerate() {
        let _ = writeln!(out, "observation {o} {name}");
    }
    for (s, name) in m.mdp().states.iter().enumerate() {
        let _ = writeln!(out, "state {s} {name} {}", m.obs[s]);
    }
    for (a, name) in m.mdp().actions.iter().enumerate() {
        let _ = writeln!(out, "action {a} {name}");
    }
    for (s, p) in m.init().iter().enumerate() {
        if *p != 0.0 {
            let _ = writeln!(out, "init {s} {}", num(*p));
        }
    }
    let na = m.num_actions();
    for (idx, row) in m.mdp().rows.iter().enumerate() {
        for &(t, p) in row {
            let _ = writeln!(out, "trans {} {} {t} {}", idx / na, idx % na, num(p));
        }
    }
    for (idx, row) in m.model.rewards.iter().enumerate() {
        for &(t, r) in row {
            let _ = writeln!(out, "reward {} {} {t} {}", idx / na, idx % na, num(r));
        }
    }
    let _ = writeln!(out, "end");
    out
}

struct Reader<'a> {
    origin: &'a str,
    line: usize,
}

impl Reader<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            origin: self.origin.to_string(),
            location: Location {
                line: self.line,
                column: 1,
            },
            message: message.into(),
        }
    }

    fn index(&self, tok: Option<&str>, bound: usize, what: &str) -> Result<usize> {
        let i: usize = tok
            .ok_or_else(|| self.err(format!("missing {what} index")))?
            .parse()
            .map_err(|_| self.err(format!("invalid {what} index")))?;
        if i >= bound {
            return Err(self.err(format!("{what} index {i} out of range")));
        }
        Ok(i)
    }

    fn number(&self, tok: Option<&str>) -> Result<f64> {
        tok.ok_or_else(|| self.err("missing number"))?
            .parse()
            .map_err(|_| self.err("invalid number"))
    }

    fn count(&self, toks: &[&str]) -> Result<usize> {
        toks.get(1)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err(format!("expected `{} <count>`", toks[0])))
    }
}

/// Reads a document produced by [`serialize_pomdp`].
pub fn parse_pomdp(text: &str, origin: &str) -> Result<Pomdp> {
    let mut r = Reader { origin, line: 0 };
    let mut name = None;
    let (mut ns, mut no, mut na) = (None, None, None);
    let mut states: Vec<Option<(String, usize)>> = Vec::new();
    let mut observations: Vec<Option<String>> = Vec::new();
    let mut actions: Vec<Option<String>> = Vec::new();
    let mut init = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rewards: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut ended = false;

    for (i, raw) in text.lines().enumerate() {
        r.line = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if ended {
            return Err(r.err("content after `end`"));
        }
        let sized = |n: Option<usize>, what: &str| n.ok_or_else(|| r.err(format!("`{what}` must precede tables")));
        match toks[0] {
            "pomdp" => name = Some(toks.get(1).ok_or_else(|| r.err("expected name"))?.to_string()),
            "states" => {
                let n = r.count(&toks)?;
                ns = Some(n);
                states = vec![None; n];
                init = vec![0.0; n];
            }
            "observations" => {
                let n = r.count(&toks)?;
                no = Some(n);
                observations = vec![None; n];
            }
            "actions" => {
                let n = r.count(&toks)?;
                na = Some(n);
                actions = vec![None; n];
            }
            "observation" => {
                let o = r.index(toks.get(1).copied(), sized(no, "observations")?, "observation")?;
                observations[o] = Some(toks.get(2).ok_or_else(|| r.err("expected name"))?.to_string());
            }
            "state" => {
                let s = r.index(toks.get(1).copied(), sized(ns, "states")?, "state")?;
                let n = toks.get(2).ok_or_else(|| r.err("expected name"))?.to_string();
                let o = r.index(toks.get(3).copied(), sized(no, "observations")?, "observation")?;
                states[s] = Some((n, o));
            }
            "action" => {
                let a = r.index(toks.get(1).copied(), sized(na, "actions")?, "action")?;
                actions[a] = Some(toks.get(2).ok_or_else(|| r.err("expected name"))?.to_string());
            }
            "init" => {
                let s = r.index(toks.get(1).copied(), sized(ns, "states")?, "state")?;
                init[s] = r.number(toks.get(2).copied())?;
            }
            "trans" | "reward" => {
                let (n_s, n_a) = (sized(ns, "states")?, sized(na, "actions")?);
                if rows.is_empty() {
                    rows = vec![Vec::new(); n_s * n_a];
                    rewards = vec![Vec::new(); n_s * n_a];
                }
                let s = r.index(toks.get(1).copied(), n_s, "state")?;
                let a = r.index(toks.get(2).copied(), n_a, "action")?;
                let t = r.index(toks.get(3).copied(), n_s, "state")?;
                let x = r.number(toks.get(4).copied())?;
                let table = if toks[0] == "trans" { &mut rows } else { &mut rewards };
                table[s * n_a + a].push((t, x));
            }
            "end" => ended = true,
            other => return Err(r.err(format!("unknown key `{other}`"))),
        }
    }
    if !ended {
        return Err(r.err("missing `end`"));
    }
    let missing = |what: &str| r.err(format!("incomplete {what} table"));
    let (ns, na) = (ns.ok_or_else(|| missing("state"))?, na.ok_or_else(|| missing("action"))?);
    if rows.is_empty() {
        rows = vec![Vec::new(); ns * na];
        rewards = vec![Vec::new(); ns * na];
    }
    let (state_names, obs): (Vec<String>, Vec<usize>) = states
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| missing("state"))?
        .into_iter()
        .unzip();
    let observations = observations.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| missing("observation"))?;
    let actions = actions.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| missing("action"))?;
    let model = RewardedMdp {
        mdp: Mdp::new(state_names, actions, rows, init)?,
        rewards,
    };
    Pomdp::new(name.ok_or_else(|| r.err("missing `pomdp` line"))?, model, observations, obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Pomdp {
        let mdp = Mdp::new(
            vec!["a".into(), "b".into(), "t".into()],
            vec!["go".into(), "stay".into()],
            vec![
                vec![(1, 0.1), (2, 0.9)],
                vec![(0, 1.0)],
                vec![(2, 1.0 / 3.0), (0, 2.0 / 3.0)],
                vec![(1, 1.0)],
                vec![(2, 1.0)],
                vec![(2, 1.0)],
            ],
            vec![0.3, 0.7, 0.0],
        )
        .unwrap();
        let mut rewards = vec![Vec::new(); 6];
        rewards[0].push((2, 1.0));
        rewards[2].push((2, 1.0));
        Pomdp::new(
            "tiny",
            RewardedMdp { mdp, rewards },
            vec!["x".into(), "t".into()],
            vec![0, 0, 1],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = tiny();
        let doc = serialize_pomdp(&m, None);
        assert_eq!(parse_pomdp(&doc, "<mem>").unwrap(), m);
        assert!(doc.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn tolerates_comments_and_blank_lines() {
        let doc = serialize_pomdp(&tiny(), None).replace("\nstates", "\n\n   # note\nstates");
        assert_eq!(parse_pomdp(&doc, "<mem>").unwrap(), tiny());
    }

    #[test]
    fn errors_name_the_line() {
        let doc = serialize_pomdp(&tiny(), None).replace("trans 0 0 1", "trans 0 0 9");
        match parse_pomdp(&doc, "<mem>") {
            Err(Error::Parse { location, message, .. }) => {
                assert!(location.line > 1);
                assert!(message.contains("out of range"));
            }
            other => panic!("{other:?}"),
        }
    }
}
