//! Exact value iteration by Incremental Pruning.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Pomdp;
use crate::solver::lp::{DenseSimplex, LpBackend};
use crate::solver::prune::{prune_indices, prune_indices_on_faces};
use crate::solver::{check_gamma, Algorithm, AlphaVector, Dynamics, SolveResult, StageValueFunction};

/// Beliefs over which a backup must reproduce the envelope.
#[derive(Debug, Clone, PartialEq)]
pub enum PruneRegion {
    /// The whole simplex.
    Simplex,
    /// Beliefs supported inside one of the listed state sets.
    Faces(Vec<Vec<usize>>),
}

impl PruneRegion {
    fn keep(&self, vectors: &[&[f64]], lp: &dyn LpBackend) -> Result<Vec<usize>> {
        match self {
            PruneRegion::Simplex => prune_indices(vectors, lp),
            PruneRegion::Faces(faces) => prune_indices_on_faces(vectors, faces, lp),
        }
    }
}

/// State sets that hold every belief the agent can be in: one per
/// observation (a posterior is supported on the states emitting what was
/// seen) plus the support of the initial belief.
pub fn reachable_faces(m: &Pomdp) -> Vec<Vec<usize>> {
    let mut faces = vec![Vec::new(); m.num_observations()];
    for (s, &o) in m.obs.iter().enumerate() {
        faces[o].push(s);
    }
    faces.retain(|f| !f.is_empty());
    let support: Vec<usize> = (0..m.num_states()).filter(|&s| m.init()[s] > 0.0).collect();
    if !faces.iter().any(|f| support.iter().all(|s| f.binary_search(s).is_ok())) {
        faces.push(support);
    }
    faces
}

#[derive(Clone)]
struct Partial {
    values: Vec<f64>,
    successors: Vec<usize>,
}

fn prune_partials(set: Vec<Partial>, region: &PruneRegion, lp: &dyn LpBackend) -> Result<Vec<Partial>> {
    if set.len() <= 1 {
        return Ok(set);
    }
    let keep = {
        let views: Vec<&[f64]> = set.iter().map(|p| p.values.as_slice()).collect();
        region.keep(&views, lp)?
    };
    let mut keep = keep.into_iter().peekable();
    Ok(set
        .into_iter()
        .enumerate()
        .filter_map(|(i, p)| keep.next_if_eq(&i).is_some().then_some(p))
        .collect())
}

fn cross_sum(acc: &[Partial], proj: &[Partial], observation: usize) -> Vec<Partial> {
    let mut out = Vec::with_capacity(acc.len() * proj.len());
    for x in acc {
        for y in proj {
            let mut successors = x.successors.clone();
            successors[observation] = y.successors[observation];
            out.push(Partial {
                values: x.values.iter().zip(&y.values).map(|(a, b)| a + b).collect(),
                successors,
            });
        }
    }
    out
}

fn backup_action(
    dy: &Dynamics,
    next: &StageValueFunction,
    action: usize,
    gamma: f64,
    region: &PruneRegion,
    lp: &dyn LpBackend,
) -> Result<Vec<Partial>> {
    let no = dy.num_observations;
    let mut acc: Option<Vec<Partial>> = None;
    for o in 0..no {
        let projected: Vec<Partial> = next
            .alphas
            .iter()
            .enumerate()
            .map(|(j, alpha)| {
                let mut successors = vec![0; no];
                successors[o] = j;
                Partial {
                    values: dy.project(action, o, &alpha.values, gamma),
                    successors,
                }
            })
            .collect();
        let projected = prune_partials(projected, region, lp)?;
        acc = Some(match acc {
            None => projected,
            Some(acc) => {
                let summed = cross_sum(&acc, &projected, o);
                // Adding one fixed vector to every member leaves the
                // envelope's membership unchanged.
                if acc.len() == 1 || projected.len() == 1 {
                    summed
                } else {
                    prune_partials(summed, region, lp)?
                }
            }
        });
    }
    Ok(acc.unwrap_or_default())
}

fn backup(
    dy: &Dynamics,
    next: &StageValueFunction,
    gamma: f64,
    region: &PruneRegion,
    lp: &dyn LpBackend,
) -> Result<StageValueFunction> {
    let per_action: Vec<Vec<Partial>> = (0..dy.num_actions)
        .into_par_iter()
        .map(|a| backup_action(dy, next, a, gamma, region, lp))
        .collect::<Result<_>>()?;
    let mut union = Vec::new();
    let mut actions = Vec::new();
    for (a, set) in per_action.into_iter().enumerate() {
        actions.extend(std::iter::repeat_n(a, set.len()));
        union.extend(set);
    }
    let keep = {
        let views: Vec<&[f64]> = union.iter().map(|p| p.values.as_slice()).collect();
        region.keep(&views, lp)?
    };
    let alphas = keep
        .into_iter()
        .map(|i| AlphaVector {
            values: std::mem::take(&mut union[i].values),
            action: actions[i],
            successors: std::mem::take(&mut union[i].successors),
        })
        .collect();
    Ok(StageValueFunction {
        stage: next.stage + 1,
        alphas,
    })
}

/// One exact Bellman backup of `next`, pruned to its envelope.
pub fn exact_backup(m: &Pomdp, next: &StageValueFunction, gamma: f64) -> Result<StageValueFunction> {
    exact_backup_with(m, next, gamma, &DenseSimplex::default())
}

pub fn exact_backup_with(
    m: &Pomdp,
    next: &StageValueFunction,
    gamma: f64,
    lp: &dyn LpBackend,
) -> Result<StageValueFunction> {
    check_gamma(gamma)?;
    backup(&Dynamics::new(m), next, gamma, &PruneRegion::Simplex, lp)
}

/// A backup exact on [`reachable_faces`] only. Values at beliefs mixing
/// several faces may be underestimated, but no reachable belief is.
pub fn reachable_backup_with(
    m: &Pomdp,
    next: &StageValueFunction,
    gamma: f64,
    lp: &dyn LpBackend,
) -> Result<StageValueFunction> {
    check_gamma(gamma)?;
    backup(&Dynamics::new(m), next, gamma, &PruneRegion::Faces(reachable_faces(m)), lp)
}

/// Stage value functions `0..=horizon`, pruned over the reachable faces.
/// Observations are a function of the state, so this loses nothing at any
/// belief the policy can visit and keeps the sets far smaller.
pub fn ip_solve_stages(
    m: &Pomdp,
    horizon: usize,
    gamma: f64,
    lp: &dyn LpBackend,
) -> Result<Vec<StageValueFunction>> {
    check_gamma(gamma)?;
    let dy = Dynamics::new(m);
    let region = PruneRegion::Faces(reachable_faces(m));
    let mut stages = vec![StageValueFunction::terminal(m.num_states(), m.num_observations())];
    for _ in 0..horizon {
        let next = backup(&dy, stages.last().expect("nonempty"), gamma, &region, lp)?;
        stages.push(next);
    }
    Ok(stages)
}

pub fn ip_solve(m: &Pomdp, horizon: usize, gamma: f64) -> Result<SolveResult> {
    ip_solve_with(m, horizon, gamma, &DenseSimplex::default())
}

pub fn ip_solve_with(m: &Pomdp, horizon: usize, gamma: f64, lp: &dyn LpBackend) -> Result<SolveResult> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let start = Instant::now();
    let stages = ip_solve_stages(m, horizon, gamma, lp)?;
    Ok(SolveResult::from_stages(
        m,
        &stages,
        horizon,
        Algorithm::IncrementalPruning,
        start.elapsed().as_secs_f64(),
    ))
}
