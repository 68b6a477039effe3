//! Reduction of a vector set to the members of its upper envelope.
//!
//! Exact duplicates and pointwise-dominated vectors go first. The rest is
//! Lark's filter: seed the kept set with the best vector at every simplex
//! corner, then for each remaining candidate ask the LP for a belief where
//! it beats the kept set by more than [`WITNESS_TOLERANCE`]. A witness
//! admits the best candidate *at that belief*, not necessarily the one
//! being tested, which is what makes the result minimal.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::solver::dot;
use crate::solver::lp::{Constraint, ConstraintKind, DenseSimplex, LinearProgram, LpBackend, LpOutcome};
use crate::solver::AlphaVector;

/// A vector survives only if some belief improves on the kept set by more
/// than this.
pub const WITNESS_TOLERANCE: f64 = 1e-9;

/// Slack allowed when testing pointwise dominance.
pub const DOMINANCE_TOLERANCE: f64 = 1e-12;

/// Prunes alpha vectors with the bundled simplex backend.
pub fn prune(alphas: Vec<AlphaVector>) -> Result<Vec<AlphaVector>> {
    prune_with(alphas, &DenseSimplex::default())
}

pub fn prune_with(alphas: Vec<AlphaVector>, lp: &dyn LpBackend) -> Result<Vec<AlphaVector>> {
    let keep = {
        let views: Vec<&[f64]> = alphas.iter().map(|a| a.values.as_slice()).collect();
        prune_indices(&views, lp)?
    };
    let mut keep = keep.into_iter().peekable();
    Ok(alphas
        .into_iter()
        .enumerate()
        .filter_map(|(i, a)| (keep.next_if_eq(&i).is_some()).then_some(a))
        .collect())
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Position in `candidates` of the best vector at `belief`; near-ties go to
/// the lexicographically largest vector, then to the lowest index.
fn best_at(vectors: &[&[f64]], candidates: &[usize], belief: &[f64]) -> usize {
    let scores: Vec<f64> = candidates.iter().map(|&i| dot(vectors[i], belief)).collect();
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<usize> = None;
    for (pos, &score) in scores.iter().enumerate() {
        if score < top - 1e-12 {
            continue;
        }
        best = match best {
            Some(b) if lex_cmp(vectors[candidates[pos]], vectors[candidates[b]]) != Ordering::Greater => Some(b),
            _ => Some(pos),
        };
    }
    best.expect("nonempty candidate list")
}

/// Solves `max d` s.t. `b·(v - w) >= d` for all kept `w`, `b` in the simplex.
fn witness(v: &[f64], kept: &[&[f64]], lp: &dyn LpBackend) -> Result<Option<Vec<f64>>> {
    let n = v.len();
    // Variables: b_0..b_{n-1}, d+, d-.
    let mut objective = vec![0.0; n + 2];
    objective[n] = 1.0;
    objective[n + 1] = -1.0;
    let mut constraints: Vec<Constraint> = kept
        .iter()
        .map(|w| {
            let mut coeffs: Vec<f64> = w.iter().zip(v).map(|(w, v)| w - v).collect();
            coeffs.push(1.0);
            coeffs.push(-1.0);
            Constraint {
                coeffs,
                kind: ConstraintKind::Le,
                rhs: 0.0,
            }
        })
        .collect();
    let mut simplex = vec![1.0; n];
    simplex.extend([0.0, 0.0]);
    constraints.push(Constraint {
        coeffs: simplex,
        kind: ConstraintKind::Eq,
        rhs: 1.0,
    });
    match lp.maximize(&LinearProgram { objective, constraints }).map_err(Error::Lp)? {
        LpOutcome::Optimal { x, value } => Ok((value > WITNESS_TOLERANCE).then(|| x[..n].to_vec())),
        other => Err(Error::Lp(format!("witness LP over {} kept vectors: {other:?}", kept.len()))),
    }
}

/// Indices (ascending) of the vectors that form the upper envelope.
pub fn prune_indices(vectors: &[&[f64]], lp: &dyn LpBackend) -> Result<Vec<usize>> {
    if vectors.len() <= 1 {
        return Ok((0..vectors.len()).collect());
    }
    let n = vectors[0].len();

    let mut alive: Vec<usize> = Vec::with_capacity(vectors.len());
    for i in 0..vectors.len() {
        if !alive.iter().any(|&j| vectors[j] == vectors[i]) {
            alive.push(i);
        }
    }
    let mut removed = vec![false; vectors.len()];
    for &i in &alive {
        let dominated = alive.iter().any(|&j| {
            j != i
                && !removed[j]
                && vectors[j]
                    .iter()
                    .zip(vectors[i])
                    .all(|(w, v)| *w >= *v - DOMINANCE_TOLERANCE)
        });
        if dominated {
            removed[i] = true;
        }
    }
    let mut frontier: Vec<usize> = alive.into_iter().filter(|&i| !removed[i]).collect();
    if frontier.len() <= 1 {
        return Ok(frontier);
    }

    let mut kept: Vec<usize> = Vec::new();
    let mut corner = vec![0.0; n];
    for s in 0..n {
        corner[s] = 1.0;
        // The best vector at this corner may already be kept.
        let mut pool: Vec<usize> = kept.iter().chain(&frontier).copied().collect();
        pool.sort_unstable();
        let best = pool[best_at(vectors, &pool, &corner)];
        if let Some(pos) = frontier.iter().position(|&i| i == best) {
            kept.push(frontier.remove(pos));
        }
        corner[s] = 0.0;
        if frontier.is_empty() {
            break;
        }
    }

    while let Some(&candidate) = frontier.first() {
        let kept_views: Vec<&[f64]> = kept.iter().map(|&i| vectors[i]).collect();
        match witness(vectors[candidate], &kept_views, lp)? {
            Some(belief) => {
                let pos = best_at(vectors, &frontier, &belief);
                kept.push(frontier.remove(pos));
            }
            None => {
                frontier.remove(0);
            }
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

/// Indices (ascending) of the vectors needed for the upper envelope over
/// beliefs supported inside one of `faces`. Each face is pruned separately
/// on its own coordinates and the survivors are merged.
pub fn prune_indices_on_faces(vectors: &[&[f64]], faces: &[Vec<usize>], lp: &dyn LpBackend) -> Result<Vec<usize>> {
    if vectors.len() <= 1 {
        return Ok((0..vectors.len()).collect());
    }
    let mut keep = Vec::new();
    for face in faces {
        let restricted: Vec<Vec<f64>> = vectors.iter().map(|v| face.iter().map(|&s| v[s]).collect()).collect();
        let views: Vec<&[f64]> = restricted.iter().map(|v| v.as_slice()).collect();
        keep.extend(prune_indices(&views, lp)?);
    }
    keep.sort_unstable();
    keep.dedup();
    Ok(keep)
}
