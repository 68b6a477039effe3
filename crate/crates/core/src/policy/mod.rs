//! Policy graphs, their exact and sampled evaluation, and the brute-force
//! optimal-value oracle.

mod eval;
mod graph;
mod oracle;
mod simulate;

pub use eval::{evaluate_on_pmdp, evaluate_on_pomdp, evaluate_per_point, node_values};
pub use graph::{PmdpPolicyView, PolicyGraph, PolicyNode};
pub use oracle::{
    best_memoryless_value, brute_force_value, brute_force_value_discounted, count_policies, OracleResult,
    PolicyTree, POLICY_LIMIT,
};
pub use simulate::{simulate, Estimate};
