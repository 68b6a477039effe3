//! Finite-horizon POMDP solvers over alpha vectors.
//!
//! Stage `k` holds the value function for `k` remaining steps; stage 0 is
//! the single zero vector. Every alpha vector carries the action taken and,
//! per observation, the index of the stage `k - 1` vector that continues
//! the plan, which is exactly what a policy graph needs.

mod belief;
mod ip;
pub mod lp;
mod pbvi;
mod prune;

use std::fmt;

pub use belief::{belief_update, Belief};
pub use ip::{
    exact_backup, exact_backup_with, ip_solve, ip_solve_stages, ip_solve_with, reachable_backup_with, reachable_faces,
    PruneRegion,
};
pub use pbvi::{pbvi_solve, pbvi_solve_stages, sample_beliefs, sample_beliefs_with_restart};
pub use prune::{prune, prune_indices, prune_indices_on_faces, prune_with, DOMINANCE_TOLERANCE, WITNESS_TOLERANCE};

use crate::model::Pomdp;
use crate::policy::PolicyGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector {
    pub values: Vec<f64>,
    pub action: usize,
    /// Next-stage vector index for every observation.
    pub successors: Vec<usize>,
}

impl AlphaVector {
    pub fn dot(&self, belief: &[f64]) -> f64 {
        dot(&self.values, belief)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageValueFunction {
    pub stage: usize,
    pub alphas: Vec<AlphaVector>,
}

impl StageValueFunction {
    /// The stage-0 value function: one zero vector, no terminal reward.
    pub fn terminal(num_states: usize, num_observations: usize) -> Self {
        StageValueFunction {
            stage: 0,
            alphas: vec![AlphaVector {
                values: vec![0.0; num_states],
                action: 0,
                successors: vec![0; num_observations],
            }],
        }
    }

    /// Upper-envelope value at `belief` and the maximizing vector (lowest
    /// index on ties).
    pub fn value_at(&self, belief: &[f64]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, a) in self.alphas.iter().enumerate() {
            let v = a.dot(belief);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    IncrementalPruning,
    Pbvi,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::IncrementalPruning => "ip",
            Algorithm::Pbvi => "pbvi",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ip" => Ok(Algorithm::IncrementalPruning),
            "pbvi" => Ok(Algorithm::Pbvi),
            other => Err(format!("unknown algorithm `{other}` (expected ip or pbvi)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub runtime_s: f64,
    /// Vector count per stage, index = stage.
    pub alpha_counts: Vec<usize>,
    pub nodes: usize,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub value: f64,
    pub policy: PolicyGraph,
    pub horizon: usize,
    pub algorithm: Algorithm,
    pub stats: SolveStats,
}

impl SolveResult {
    /// Packages the stage `horizon` solution of a stage sequence.
    pub fn from_stages(
        m: &Pomdp,
        stages: &[StageValueFunction],
        horizon: usize,
        algorithm: Algorithm,
        runtime_s: f64,
    ) -> Self {
        let belief = m.init();
        let (value, root) = stages[horizon].value_at(belief);
        let policy = PolicyGraph::from_stages(&stages[..=horizon], root);
        SolveResult {
            value,
            horizon,
            algorithm,
            stats: SolveStats {
                runtime_s,
                alpha_counts: stages[..=horizon].iter().map(|s| s.alphas.len()).collect(),
                nodes: policy.len(),
            },
            policy,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A transition with its reward, `(target, probability, reward)`.
pub(crate) type Outcome = (usize, f64, f64);

/// Transition structure regrouped for backups.
pub(crate) struct Dynamics {
    pub num_states: usize,
    pub num_actions: usize,
    pub num_observations: usize,
    pub obs: Vec<usize>,
    /// `(from, to, probability, reward)` per `(action, observation)`.
    pub by_action_obs: Vec<Vec<(usize, usize, f64, f64)>>,
    /// Outcomes per `(state, action)`, state-major.
    pub outcomes: Vec<Vec<Outcome>>,
}

impl Dynamics {
    pub fn new(m: &Pomdp) -> Self {
        let (ns, na, no) = (m.num_states(), m.num_actions(), m.num_observations());
        let mut by_action_obs = vec![Vec::new(); na * no];
        let mut outcomes = Vec::with_capacity(ns * na);
        for s in 0..ns {
            for a in 0..na {
                let row: Vec<Outcome> = m
                    .mdp()
                    .row(s, a)
                    .iter()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|&(t, p)| (t, p, m.model.reward(s, a, t)))
                    .collect();
                for &(t, p, r) in &row {
                    by_action_obs[a * no + m.obs[t]].push((s, t, p, r));
                }
                outcomes.push(row);
            }
        }
        Dynamics {
            num_states: ns,
            num_actions: na,
            num_observations: no,
            obs: m.obs.clone(),
            by_action_obs,
            outcomes,
        }
    }

    /// `g(s) = sum_{s' : obs(s') = o} T(s,a,s') (R(s,a,s') + gamma next(s'))`.
    pub fn project(&self, action: usize, observation: usize, next: &[f64], gamma: f64) -> Vec<f64> {
        let mut g = vec![0.0; self.num_states];
        for &(s, t, p, r) in &self.by_action_obs[action * self.num_observations + observation] {
            g[s] += p * (r + gamma * next[t]);
        }
        g
    }

    /// Full backup of a fixed plan: take `action`, continue with
    /// `next[successors[o]]` after observation `o`.
    pub fn plan_values(&self, action: usize, successors: &[usize], next: &[AlphaVector], gamma: f64) -> Vec<f64> {
        (0..self.num_states)
            .map(|s| {
                self.outcomes[s * self.num_actions + action]
                    .iter()
                    .map(|&(t, p, r)| p * (r + gamma * next[successors[self.obs[t]]].values[t]))
                    .sum()
            })
            .collect()
    }
}

pub(crate) fn check_gamma(gamma: f64) -> crate::Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(crate::Error::InvalidArgument(format!("discount {gamma} outside (0, 1]")))
    }
}
