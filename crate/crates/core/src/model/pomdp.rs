use crate::error::{Error, Result};
use crate::model::{Mdp, RewardedMdp};

/// A POMDP with a deterministic, state-based observation function.
#[derive(Debug, Clone, PartialEq)]
pub struct Pomdp {
    pub name: String,
    pub model: RewardedMdp,
    pub observations: Vec<String>,
    /// Observation index of every state.
    pub obs: Vec<usize>,
}

impl Pomdp {
    pub fn new(name: impl Into<String>, model: RewardedMdp, observations: Vec<String>, obs: Vec<usize>) -> Result<Self> {
        let p = Pomdp {
            name: name.into(),
            model,
            observations,
            obs,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        self.model.mdp.check()?;
        if self.obs.len() != self.num_states() {
            return Err(Error::Validation("observation function is not total on states".into()));
        }
        if let Some(o) = self.obs.iter().find(|&&o| o >= self.observations.len()) {
            return Err(Error::Validation(format!("unknown observation index {o}")));
        }
        if self.model.rewards.len() != self.model.mdp.rows.len() {
            return Err(Error::Validation("reward rows do not match transition rows".into()));
        }
        if self.model.rewards.iter().flatten().any(|(_, r)| !r.is_finite()) {
            return Err(Error::Validation("non-finite reward".into()));
        }
        Ok(())
    }

    pub fn mdp(&self) -> &Mdp {
        &self.model.mdp
    }

    pub fn num_states(&self) -> usize {
        self.model.mdp.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.model.mdp.num_actions()
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn init(&self) -> &[f64] {
        &self.model.mdp.init
    }
}
