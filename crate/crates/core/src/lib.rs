//! Parameter-independent policies for parametric MDPs.
//!
//! A parametric MDP together with a finite distribution over parameter
//! points induces a POMDP whose hidden state is the pair (model state,
//! point) and whose observation is the model state. Solving that POMDP
//! yields one observation-based policy that performs well across all
//! points; [`solver`] provides exact Incremental Pruning and point-based
//! value iteration, and [`policy`] evaluates the resulting policy graphs.
//!
//! ```
//! use pmdp_core::parser::{parse_pmdp, ModelSource};
//! use pmdp_core::{discretize_uniform, induce_pomdp, ip_solve};
//!
//! let src = ModelSource::new(
//!     "pmdp coin\nparam p\nstate s t x\naction flip\ninit s:1\ntarget t\ntrans s flip t:p, x:1-p",
//!     "<doc>",
//! );
//! let parsed = parse_pmdp(&src).unwrap();
//! let pts = discretize_uniform(&parsed.pmdp, 3).unwrap();
//! let (pomdp, _) = induce_pomdp(&parsed.pmdp, &pts, parsed.target.unwrap()).unwrap();
//! let result = ip_solve(&pomdp, 1, 1.0).unwrap();
//! assert!((result.value - 0.5).abs() < 1e-12);
//! ```

pub mod encoder;
pub mod error;
pub mod model;
pub mod parser;
pub mod policy;
pub mod solver;

pub use encoder::{discretize_uniform, induce_pomdp, initial_belief, EncodingMap, ParamPointSet};
pub use error::{Error, ExprError, Location, Result};
pub use model::{reachability_transform, Mdp, Param, ParamExpr, Pmdp, Pomdp, RewardedMdp, Violation};
pub use policy::{PmdpPolicyView, PolicyGraph, PolicyNode};
pub use solver::{
    ip_solve, pbvi_solve, Algorithm, AlphaVector, Belief, SolveResult, SolveStats, StageValueFunction,
};
