use crate::encoder::ParamPointSet;
use crate::error::{Error, Result};
use crate::model::{reachability_transform, Pmdp, Pomdp, RewardedMdp};
use crate::policy::{PmdpPolicyView, PolicyGraph};

/// `V_h(v, s)` for every node `v` and state `s` of a rewarded model whose
/// observation of state `s` is `obs(s)`.
fn node_state_values(
    model: &RewardedMdp,
    obs: &dyn Fn(usize) -> usize,
    g: &PolicyGraph,
    horizon: usize,
    gamma: f64,
) -> Vec<Vec<f64>> {
    let m = &model.mdp;
    let ns = m.num_states();
    let mut v = vec![vec![0.0; ns]; g.len()];
    for _ in 0..horizon {
        v = g
            .nodes
            .iter()
            .map(|node| {
                (0..ns)
                    .map(|s| {
                        m.row(s, node.action)
                            .iter()
                            .map(|&(t, p)| {
                                p * (model.reward(s, node.action, t) + gamma * v[node.edges[obs(t)]][t])
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
    }
    v
}

fn check_alphabet(g: &PolicyGraph, expected: usize) -> Result<()> {
    g.check()?;
    if g.num_observations() != expected {
        return Err(Error::AlphabetMismatch {
            expected,
            found: g.num_observations(),
        });
    }
    Ok(())
}

/// Per-node, per-state values of following `g` for `horizon` steps.
pub fn node_values(m: &Pomdp, g: &PolicyGraph, horizon: usize, gamma: f64) -> Result<Vec<Vec<f64>>> {
    check_alphabet(g, m.num_observations())?;
    Ok(node_state_values(&m.model, &|s| m.obs[s], g, horizon, gamma))
}

/// Expected accumulated reward of `g` over `horizon` steps from the
/// initial distribution.
pub fn evaluate_on_pomdp(m: &Pomdp, g: &PolicyGraph, horizon: usize, gamma: f64) -> Result<f64> {
    let v = node_values(m, g, horizon, gamma)?;
    Ok(m.init().iter().zip(&v[g.initial]).map(|(i, x)| i * x).sum())
}

/// Weighted sum over parameter points of the reachability probability of
/// `target` within `horizon` steps in `M(x)` under the graph.
pub fn evaluate_on_pmdp(
    m: &Pmdp,
    pts: &ParamPointSet,
    view: &PmdpPolicyView,
    target: usize,
    horizon: usize,
) -> Result<f64> {
    let per_point = evaluate_per_point(m, pts, view, target, horizon)?;
    Ok(per_point.iter().zip(pts.weights()).map(|(v, w)| v * w).sum())
}

/// Reachability probability at every point, before weighting.
pub fn evaluate_per_point(
    m: &Pmdp,
    pts: &ParamPointSet,
    view: &PmdpPolicyView,
    target: usize,
    horizon: usize,
) -> Result<Vec<f64>> {
    check_alphabet(&view.graph, m.num_states())?;
    pts.points()
        .iter()
        .map(|x| {
            let rewarded = reachability_transform(&m.instantiate(x)?, target)?;
            let v = node_state_values(&rewarded, &|s| s, &view.graph, horizon, 1.0);
            Ok(m.init.iter().zip(&v[view.graph.initial]).map(|(i, x)| i * x).sum())
        })
        .collect()
}
