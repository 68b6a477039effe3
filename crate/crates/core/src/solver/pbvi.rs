//! Point-based value iteration over a fixed belief set.
//!
//! The belief set is the simplex corners, the uniform midpoint, then
//! beliefs reached by forward simulation under random actions. Each backup
//! keeps one vector per belief, so every vector is the value of an actual
//! plan and the result is a lower bound on the exact value.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Pomdp;
use crate::solver::{check_gamma, Algorithm, AlphaVector, Belief, Dynamics, SolveResult, StageValueFunction};

/// Restart period of the belief sampler when no horizon is given.
pub const DEFAULT_RESTART: usize = 16;

/// Sparse belief, ascending state order.
type Sparse = Vec<(usize, f64)>;

fn l1(a: &Sparse, b: &Sparse) -> f64 {
    let (mut i, mut j, mut d) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(sa, pa)), Some(&(sb, pb))) if sa == sb => {
                d += (pa - pb).abs();
                i += 1;
                j += 1;
            }
            (Some(&(sa, pa)), Some(&(sb, _))) if sa < sb => {
                d += pa;
                i += 1;
            }
            (Some(&(_, pa)), None) => {
                d += pa;
                i += 1;
            }
            (_, Some(&(_, pb))) => {
                d += pb;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    d
}

fn to_dense(b: &Sparse, n: usize) -> Belief {
    let mut v = vec![0.0; n];
    for &(s, p) in b {
        v[s] = p;
    }
    Belief::new_unchecked(v)
}

/// Observation distribution and unnormalized posteriors after `action`.
fn successors(dy: &Dynamics, b: &Sparse, action: usize) -> Vec<(usize, f64, Sparse)> {
    let mut by_obs: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); dy.num_observations];
    for &(s, bs) in b {
        for &(t, p, _) in &dy.outcomes[s * dy.num_actions + action] {
            *by_obs[dy.obs[t]].entry(t).or_insert(0.0) += bs * p;
        }
    }
    by_obs
        .into_iter()
        .enumerate()
        .filter_map(|(o, mass)| {
            let total: f64 = mass.values().sum();
            (total > 0.0).then(|| {
                let post: Sparse = mass.into_iter().map(|(t, p)| (t, p / total)).collect();
                (o, total, post)
            })
        })
        .collect()
}

fn sample_sparse(m: &Pomdp, dy: &Dynamics, n: usize, seed: u64, restart: usize) -> Vec<Sparse> {
    let ns = m.num_states();
    let mut out: Vec<Sparse> = (0..ns).map(|s| vec![(s, 1.0)]).collect();
    out.push((0..ns).map(|s| (s, 1.0 / ns as f64)).collect());
    let wanted = n.saturating_sub(ns + 1);
    if wanted == 0 {
        return out;
    }
    let initial: Sparse = m
        .init()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(s, p)| (s, *p))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let actions: Vec<usize> = (0..dy.num_actions).collect();
    let mut current = initial.clone();
    let mut steps = 0;
    let mut added = 0;
    // The reachable belief set may be smaller than requested.
    let budget = 200 * n + 1000;
    for _ in 0..budget {
        if added == wanted {
            break;
        }
        if steps == restart.max(1) {
            current = initial.clone();
            steps = 0;
        }
        let action = *actions.choose(&mut rng).expect("at least one action");
        let outs = successors(dy, &current, action);
        if outs.is_empty() {
            current = initial.clone();
            steps = 0;
            continue;
        }
        let mut u: f64 = rng.gen();
        let mut pick = outs.len() - 1;
        for (i, (_, pr, _)) in outs.iter().enumerate() {
            if u < *pr {
                pick = i;
                break;
            }
            u -= pr;
        }
        let post = outs.into_iter().nth(pick).expect("picked").2;
        steps += 1;
        if !out.iter().any(|b| l1(b, &post) <= 1e-9) {
            out.push(post.clone());
            added += 1;
        }
        current = post;
    }
    out
}

/// Corners, midpoint, then up to `n - |S| - 1` simulated beliefs.
pub fn sample_beliefs(m: &Pomdp, n: usize, seed: u64) -> Vec<Belief> {
    sample_beliefs_with_restart(m, n, seed, DEFAULT_RESTART)
}

pub fn sample_beliefs_with_restart(m: &Pomdp, n: usize, seed: u64, restart: usize) -> Vec<Belief> {
    let dy = Dynamics::new(m);
    sample_sparse(m, &dy, n, seed, restart)
        .iter()
        .map(|b| to_dense(b, m.num_states()))
        .collect()
}

/// Best plan at one belief: the action and its per-observation successors.
fn point_backup(dy: &Dynamics, next: &StageValueFunction, b: &Sparse, gamma: f64) -> (usize, Vec<usize>) {
    let (no, nj) = (dy.num_observations, next.alphas.len());
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    let mut scores = vec![0.0; no * nj];
    let mut touched = vec![false; no];
    for a in 0..dy.num_actions {
        scores.iter_mut().for_each(|v| *v = 0.0);
        touched.iter_mut().for_each(|v| *v = false);
        for &(s, bs) in b {
            for &(t, p, r) in &dy.outcomes[s * dy.num_actions + a] {
                let o = dy.obs[t];
                touched[o] = true;
                let w = bs * p;
                for (j, alpha) in next.alphas.iter().enumerate() {
                    scores[o * nj + j] += w * (r + gamma * alpha.values[t]);
                }
            }
        }
        let mut total = 0.0;
        let mut succ = vec![0; no];
        for o in 0..no {
            if !touched[o] {
                continue;
            }
            let row = &scores[o * nj..(o + 1) * nj];
            let mut j_best = 0;
            for j in 1..nj {
                if row[j] > row[j_best] {
                    j_best = j;
                }
            }
            succ[o] = j_best;
            total += row[j_best];
        }
        if best.as_ref().is_none_or(|(v, _, _)| total > *v) {
            best = Some((total, a, succ));
        }
    }
    let (_, a, succ) = best.expect("at least one action");
    (a, succ)
}

fn pbvi_backup(dy: &Dynamics, next: &StageValueFunction, beliefs: &[Sparse], gamma: f64) -> StageValueFunction {
    let plans: Vec<(usize, Vec<usize>)> = beliefs.par_iter().map(|b| point_backup(dy, next, b, gamma)).collect();
    let mut seen: HashSet<&(usize, Vec<usize>)> = HashSet::new();
    let mut unique = Vec::new();
    for plan in &plans {
        if seen.insert(plan) {
            unique.push(plan);
        }
    }
    let alphas = unique
        .par_iter()
        .map(|(a, succ)| AlphaVector {
            values: dy.plan_values(*a, succ, &next.alphas, gamma),
            action: *a,
            successors: succ.clone(),
        })
        .collect::<Vec<_>>();
    // Distinct plans can share a value vector.
    let mut deduped: Vec<AlphaVector> = Vec::with_capacity(alphas.len());
    for a in alphas {
        if !deduped.iter().any(|d| d.values == a.values) {
            deduped.push(a);
        }
    }
    StageValueFunction {
        stage: next.stage + 1,
        alphas: deduped,
    }
}

pub fn pbvi_solve_stages(
    m: &Pomdp,
    horizon: usize,
    n_beliefs: usize,
    seed: u64,
    gamma: f64,
) -> Result<Vec<StageValueFunction>> {
    check_gamma(gamma)?;
    if n_beliefs == 0 {
        return Err(Error::InvalidArgument("need at least one belief".into()));
    }
    let dy = Dynamics::new(m);
    let beliefs = sample_sparse(m, &dy, n_beliefs, seed, horizon.max(1));
    let mut stages = vec![StageValueFunction::terminal(m.num_states(), m.num_observations())];
    for _ in 0..horizon {
        let next = pbvi_backup(&dy, stages.last().expect("nonempty"), &beliefs, gamma);
        stages.push(next);
    }
    Ok(stages)
}

pub fn pbvi_solve(m: &Pomdp, horizon: usize, n_beliefs: usize, seed: u64, gamma: f64) -> Result<SolveResult> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let start = Instant::now();
    let stages = pbvi_solve_stages(m, horizon, n_beliefs, seed, gamma)?;
    Ok(SolveResult::from_stages(m, &stages, horizon, Algorithm::Pbvi, start.elapsed().as_secs_f64()))
}
