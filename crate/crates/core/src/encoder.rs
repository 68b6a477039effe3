//! Discretized parameter distributions and the induced POMDP.
//!
//! Encoded states are pairs `(model state, point)` laid out point-major:
//! the pair `(s, k)` has index `k * |S| + s`. Transitions never leave a
//! point's block, and the observation of `(s, k)` is `s`, so a policy on the
//! encoding sees the model state but never the parameter value.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{reachability_transform, Mdp, Pmdp, Pomdp, RewardedMdp};
use crate::solver::Belief;

/// Finite parameter distribution: points (one coordinate per parameter)
/// with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPointSet {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl ParamPointSet {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidArgument("need one weight per point, at least one point".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidArgument("points have different dimensions".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::InvalidArgument(format!("duplicate point {p:?}")));
            }
        }
        Ok(ParamPointSet { points, weights })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Evenly spaced grid with `n` points per parameter (endpoints included,
/// midpoint when `n == 1`), Cartesian product, uniform weights.
pub fn discretize_uniform(m: &Pmdp, n_per_param: usize) -> Result<ParamPointSet> {
    if n_per_param == 0 {
        return Err(Error::InvalidArgument("need at least one point per parameter".into()));
    }
    let axes: Vec<Vec<f64>> = m
        .params
        .iter()
        .map(|p| {
            if n_per_param == 1 {
                vec![(p.lower + p.upper) / 2.0]
            } else {
                let step = (p.upper - p.lower) / (n_per_param - 1) as f64;
                (0..n_per_param)
                    .map(|i| if i == n_per_param - 1 { p.upper } else { p.lower + step * i as f64 })
                    .collect()
            }
        })
        .collect();
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    let w = 1.0 / points.len() as f64;
    let weights = vec![w; points.len()];
    // Weights of huge grids can drift from 1 by more than the constructor
    // tolerance; normalize directly.
    Ok(ParamPointSet { points, weights })
}

/// Bijection between `(model state, point index)` and encoded state index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodingMap {
    pub num_model_states: usize,
    pub num_points: usize,
}

impl EncodingMap {
    pub fn forward(&self, state: usize, point: usize) -> usize {
        debug_assert!(state < self.num_model_states && point < self.num_points);
        point * self.num_model_states + state
    }

    pub fn inverse(&self, encoded: usize) -> (usize, usize) {
        (encoded % self.num_model_states, encoded / self.num_model_states)
    }

    pub fn len(&self) -> usize {
        self.num_model_states * self.num_points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds the induced POMDP of `m` under the distribution `pts`, with the
/// reachability reward for `target` applied inside every point's block.
pub fn induce_pomdp(m: &Pmdp, pts: &ParamPointSet, target: usize) -> Result<(Pomdp, EncodingMap)> {
    if target >= m.num_states() {
        return Err(Error::InvalidArgument(format!("target index {target} out of range")));
    }
    let blocks: Vec<RewardedMdp> = pts
        .points()
        .par_iter()
        .map(|x| reachability_transform(&m.instantiate(x)?, target))
        .collect::<Result<_>>()?;

    let map = EncodingMap {
        num_model_states: m.num_states(),
        num_points: pts.len(),
    };
    let na = m.num_actions();
    let mut states = Vec::with_capacity(map.len());
    let mut rows = Vec::with_capacity(map.len() * na);
    let mut rewards = Vec::with_capacity(map.len() * na);
    let mut init = Vec::with_capacity(map.len());
    let mut obs = Vec::with_capacity(map.len());
    for (k, block) in blocks.iter().enumerate() {
        let offset = k * m.num_states();
        for s in 0..m.num_states() {
            states.push(format!("{}@{k}", m.states[s]));
            init.push(m.init[s] * pts.weights()[k]);
            obs.push(s);
            for a in 0..na {
                let idx = s * na + a;
                rows.push(block.mdp.rows[idx].iter().map(|&(t, p)| (t + offset, p)).collect());
                rewards.push(block.rewards[idx].iter().map(|&(t, r)| (t + offset, r)).collect());
            }
        }
    }
    let model = RewardedMdp {
        mdp: Mdp {
            states,
            actions: m.actions.clone(),
            rows,
            init,
        },
        rewards,
    };
    let pomdp = Pomdp::new(format!("{}-induced", m.name), model, m.states.clone(), obs)?;
    Ok((pomdp, map))
}

/// The initial belief of a POMDP, i.e. its initial distribution.
pub fn initial_belief(m: &Pomdp) -> Belief {
    Belief::new_unchecked(m.init().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Param, ParamExpr};

    fn coin() -> Pmdp {
        let e = |s: &str| ParamExpr::parse(s).unwrap();
        Pmdp {
            name: "coin".into(),
            states: vec!["s".into(), "t".into(), "x".into()],
            actions: vec!["flip".into()],
            params: vec![Param::unit("p")],
            rows: vec![
                vec![(1, e("p")), (2, e("1-p"))],
                vec![(1, e("1"))],
                vec![(2, e("1"))],
            ],
            init: vec![1.0, 0.0, 0.0],
        }
    }

    #[test]
    fn uniform_grids() {
        let m = coin();
        let two = discretize_uniform(&m, 2).unwrap();
        assert_eq!(two.points(), &[vec![0.0], vec![1.0]]);
        assert_eq!(two.weights(), &[0.5, 0.5]);
        let five = discretize_uniform(&m, 5).unwrap();
        assert_eq!(five.points().iter().map(|p| p[0]).collect::<Vec<_>>(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(five.weights().iter().all(|&w| w == 0.2));
        let one = discretize_uniform(&m, 1).unwrap();
        assert_eq!(one.points(), &[vec![0.5]]);

        let mut two_params = m.clone();
        two_params.params.push(Param::unit("b"));
        assert_eq!(discretize_uniform(&two_params, 10).unwrap().len(), 100);
    }

    #[test]
    fn point_set_rejects_bad_input() {
        assert!(ParamPointSet::new(vec![vec![0.0], vec![0.0]], vec![0.5, 0.5]).is_err());
        assert!(ParamPointSet::new(vec![vec![0.0], vec![1.0]], vec![0.5, 0.6]).is_err());
        assert!(ParamPointSet::new(vec![vec![0.0], vec![1.0]], vec![-0.5, 1.5]).is_err());
    }

    #[test]
    fn encoding_is_block_diagonal_and_observes_model_state() {
        let m = coin();
        let pts = discretize_uniform(&m, 4).unwrap();
        let (pomdp, map) = induce_pomdp(&m, &pts, 1).unwrap();
        assert_eq!(pomdp.num_states(), 12);
        for e in 0..map.len() {
            let (s, k) = map.inverse(e);
            assert_eq!(map.forward(s, k), e);
            assert_eq!(pomdp.obs[e], s);
            for a in 0..pomdp.num_actions() {
                let row = pomdp.mdp().row(e, a);
                let in_block: f64 = row.iter().filter(|(t, _)| map.inverse(*t).1 == k).map(|(_, p)| p).sum();
                assert!((in_block - 1.0).abs() < 1e-12);
                assert!(row.iter().all(|(t, _)| map.inverse(*t).1 == k));
            }
        }
        let b = initial_belief(&pomdp);
        for k in 0..4 {
            assert_eq!(b.probs()[map.forward(0, k)], 0.25);
        }
        // Target blocks absorb and entry edges pay.
        assert_eq!(pomdp.model.reward(map.forward(0, 2), 0, map.forward(1, 2)), 1.0);
        assert_eq!(pomdp.mdp().row(map.forward(1, 2), 0), &vec![(map.forward(1, 2), 1.0)]);
    }
}
