use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::encoder::ParamPointSet;
use crate::error::{Error, Result};
use crate::model::{reachability_transform, Mdp, Pmdp};
use crate::policy::PmdpPolicyView;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub episodes: usize,
}

fn sample_index(rng: &mut ChaCha8Rng, weights: impl Iterator<Item = f64>) -> usize {
    let mut u: f64 = rng.gen();
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            if u < w {
                return i;
            }
            u -= w;
            last = i;
        }
    }
    last
}

fn episode(mdps: &[Mdp], weights: &[f64], init: &[f64], view: &PmdpPolicyView, target: usize, horizon: usize, rng: &mut ChaCha8Rng) -> bool {
    let mdp = &mdps[sample_index(rng, weights.iter().copied())];
    let mut state = sample_index(rng, init.iter().copied());
    let mut node = view.graph.initial;
    for _ in 0..horizon {
        let n = &view.graph.nodes[node];
        let row = mdp.row(state, n.action);
        let next = row[sample_index(rng, row.iter().map(|(_, p)| *p))].0;
        if next == target && state != target {
            return true;
        }
        state = next;
        node = n.edges[next];
    }
    false
}

/// Monte-Carlo estimate of the reachability probability under the graph.
///
/// Episode `e` draws from ChaCha8 seeded with `seed` on stream `e`, so the
/// result does not depend on thread scheduling.
pub fn simulate(
    m: &Pmdp,
    pts: &ParamPointSet,
    view: &PmdpPolicyView,
    target: usize,
    horizon: usize,
    episodes: usize,
    seed: u64,
) -> Result<Estimate> {
    if episodes == 0 {
        return Err(Error::InvalidArgument("need at least one episode".into()));
    }
    if view.graph.num_observations() != m.num_states() {
        return Err(Error::AlphabetMismatch {
            expected: m.num_states(),
            found: view.graph.num_observations(),
        });
    }
    let mdps: Vec<Mdp> = pts
        .points()
        .iter()
        .map(|x| reachability_transform(&m.instantiate(x)?, target).map(|r| r.mdp))
        .collect::<Result<_>>()?;
    let hits: Vec<bool> = (0..episodes)
        .into_par_iter()
        .map(|e| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(e as u64);
            episode(&mdps, pts.weights(), &m.init, view, target, horizon, &mut rng)
        })
        .collect();
    let n = episodes as f64;
    let count = hits.iter().filter(|h| **h).count() as f64;
    let mean = count / n;
    let var = if episodes > 1 {
        (count * (1.0 - mean).powi(2) + (n - count) * mean.powi(2)) / (n - 1.0)
    } else {
        0.0
    };
    Ok(Estimate {
        estimate: mean,
        standard_error: (var / n).sqrt(),
        episodes,
    })
}
