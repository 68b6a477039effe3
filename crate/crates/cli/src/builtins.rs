//! Bundled benchmark models.

use pmdp_core::model::{Param, ParamExpr, Pmdp, SymbolicRow};
use pmdp_core::parser::{parse_pmdp, ModelSource};
use pmdp_core::{Error, Result};

pub const LEARNER_SOURCE: &str = include_str!("../models/learner.pmdp");
pub const REPEATED_LEARNER_SOURCE: &str = include_str!("../models/repeated-learner.pmdp");

pub const BUILTIN_NAMES: [&str; 4] = ["learner", "repeated-learner", "grid1", "grid2"];

/// A bundled model with its default target state.
pub fn builtin_model(name: &str) -> Result<(Pmdp, usize)> {
    match name {
        "learner" => from_source(LEARNER_SOURCE),
        "repeated-learner" => from_source(REPEATED_LEARNER_SOURCE),
        "grid1" => Ok(grid(GridErrors::Symmetric)),
        "grid2" => Ok(grid(GridErrors::Biased)),
        other => Err(Error::InvalidArgument(format!(
            "unknown builtin model `{other}` (known: {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

fn from_source(text: &str) -> Result<(Pmdp, usize)> {
    let parsed = parse_pmdp(&ModelSource::new(text, "<builtin>"))?;
    let target = parsed.target.expect("bundled models declare a target");
    Ok((parsed.pmdp, target))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridErrors {
    /// Slips left and right with `p/2` each.
    Symmetric,
    /// Slips left with `p*b` and right with `p*(1-b)`.
    Biased,
}

pub const GRID_SIZE: i32 = 3;

/// `(row, column)` displacement of every action: up, down, left, right.
const MOVES: [(&str, (i32, i32)); 4] = [("up", (1, 0)), ("down", (-1, 0)), ("left", (0, -1)), ("right", (0, 1))];

fn cell_name(r: i32, c: i32) -> String {
    format!("r{r}c{c}")
}

fn cell_index(r: i32, c: i32) -> Option<usize> {
    ((1..=GRID_SIZE).contains(&r) && (1..=GRID_SIZE).contains(&c)).then(|| ((r - 1) * GRID_SIZE + (c - 1)) as usize)
}

/// Robot-relative left and right of a heading.
fn sides(heading: (i32, i32)) -> ((i32, i32), (i32, i32)) {
    let (dr, dc) = heading;
    ((dc, -dr), (-dc, dr))
}

fn expr(text: &str) -> ParamExpr {
    ParamExpr::parse(text).expect("well-formed builtin expression")
}

/// The 3x3 robot grid: start (1,1), absorbing sink (2,2), target (3,3).
///
/// A move goes forward with `1-p` and slips sideways otherwise. A slip
/// towards a wall goes to the other side instead; a blocked forward move
/// leaves the robot in place.
pub fn grid(errors: GridErrors) -> (Pmdp, usize) {
    let mut states = Vec::new();
    for r in 1..=GRID_SIZE {
        for c in 1..=GRID_SIZE {
            states.push(cell_name(r, c));
        }
    }
    let actions: Vec<String> = MOVES.iter().map(|(n, _)| n.to_string()).collect();
    let sink = cell_index(2, 2).expect("on grid");
    let target = cell_index(GRID_SIZE, GRID_SIZE).expect("on grid");
    let (left_p, right_p) = match errors {
        GridErrors::Symmetric => ("p/2", "p/2"),
        GridErrors::Biased => ("p*b", "p*(1-b)"),
    };

    let mut rows: Vec<SymbolicRow> = Vec::new();
    for r in 1..=GRID_SIZE {
        for c in 1..=GRID_SIZE {
            let here = cell_index(r, c).expect("on grid");
            for (_, heading) in MOVES {
                if here == sink {
                    rows.push(vec![(here, ParamExpr::Const(1.0))]);
                    continue;
                }
                let forward = cell_index(r + heading.0, c + heading.1).unwrap_or(here);
                let (l, rt) = sides(heading);
                let left = cell_index(r + l.0, c + l.1);
                let right = cell_index(r + rt.0, c + rt.1);
                let mut row: SymbolicRow = vec![(forward, expr("1-p"))];
                match (left, right) {
                    (Some(l), Some(rt)) => {
                        row.push((l, expr(left_p)));
                        row.push((rt, expr(right_p)));
                    }
                    (Some(side), None) | (None, Some(side)) => row.push((side, expr("p"))),
                    (None, None) => row[0].1 = ParamExpr::Const(1.0),
                }
                rows.push(row);
            }
        }
    }
    let mut params = vec![Param::unit("p")];
    if errors == GridErrors::Biased {
        params.push(Param::unit("b"));
    }
    let mut init = vec![0.0; states.len()];
    init[cell_index(1, 1).expect("on grid")] = 1.0;
    let name = match errors {
        GridErrors::Symmetric => "grid1",
        GridErrors::Biased => "grid2",
    };
    let pmdp = Pmdp {
        name: name.into(),
        states,
        actions,
        params,
        rows,
        init,
    };
    (pmdp, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sides_follow_the_heading() {
        assert_eq!(sides((1, 0)), ((0, -1), (0, 1)));
        assert_eq!(sides((-1, 0)), ((0, 1), (0, -1)));
        assert_eq!(sides((0, 1)), ((1, 0), (-1, 0)));
        assert_eq!(sides((0, -1)), ((-1, 0), (1, 0)));
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(builtin_model("consensus").is_err());
    }
}
