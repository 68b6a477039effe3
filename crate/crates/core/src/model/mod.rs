//! MDPs, parametric MDPs and POMDPs.

mod expr;
mod mdp;
mod pmdp;
mod pomdp;

pub use expr::ParamExpr;
pub use mdp::{reachability_transform, Mdp, RewardedMdp, Row};
pub use pmdp::{Param, Pmdp, SymbolicRow, Violation};
pub use pomdp::Pomdp;

/// Absolute tolerance on probability row sums.
pub const PROB_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_distribution(values: impl Iterator<Item = f64>) -> Result<(), String> {
    let mut sum = 0.0;
    for v in values {
        if !(-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&v) {
            return Err(format!("probability {v} outside [0, 1]"));
        }
        sum += v;
    }
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(format!("row sums to {sum}"));
    }
    Ok(())
}
