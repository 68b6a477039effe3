use crate::error::{Error, Result};
use crate::model::Pomdp;

/// Probability distribution over POMDP states.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument("belief entries must lie in [0, 1]".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("belief sums to {total}")));
        }
        Ok(Belief(probs))
    }

    pub(crate) fn new_unchecked(probs: Vec<f64>) -> Self {
        Belief(probs)
    }

    pub fn dirac(num_states: usize, state: usize) -> Self {
        let mut v = vec![0.0; num_states];
        v[state] = 1.0;
        Belief(v)
    }

    pub fn uniform(num_states: usize) -> Self {
        Belief(vec![1.0 / num_states as f64; num_states])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l1_distance(&self, other: &Belief) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }
}

impl AsRef<[f64]> for Belief {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Bayes filter: posterior after taking `action` and observing
/// `observation`, together with `Pr(observation | belief, action)`.
pub fn belief_update(m: &Pomdp, belief: &Belief, action: usize, observation: usize) -> Result<(Belief, f64)> {
    if belief.len() != m.num_states() {
        return Err(Error::InvalidArgument("belief length does not match state count".into()));
    }
    let mut post = vec![0.0; m.num_states()];
    for (s, &bs) in belief.probs().iter().enumerate() {
        if bs == 0.0 {
            continue;
        }
        for &(t, p) in m.mdp().row(s, action) {
            if m.obs[t] == observation {
                post[t] += bs * p;
            }
        }
    }
    let norm: f64 = post.iter().sum();
    if norm <= 0.0 {
        return Err(Error::ImpossibleObservation);
    }
    post.iter_mut().for_each(|p| *p /= norm);
    Ok((Belief(post), norm))
}
