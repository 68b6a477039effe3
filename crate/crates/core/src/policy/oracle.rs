//! Brute-force optimal values by policy enumeration.
//!
//! Deterministic observation-history policies of depth `h` are policy
//! trees: an action at the root and one subtree per observation that can
//! follow it. Every tree over the reachable observation-history tree is
//! enumerated and scored; nothing here shares code with the alpha-vector
//! solvers.

use crate::error::{Error, Result};
use crate::model::Pomdp;
use crate::policy::{PolicyGraph, PolicyNode};

/// Upper bound on the number of enumerated policies.
pub const POLICY_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTree {
    pub action: usize,
    pub children: Vec<(usize, PolicyTree)>,
}

impl PolicyTree {
    /// Graph form; edges for observations that cannot occur loop back to
    /// the node itself.
    pub fn to_graph(&self, num_states: usize, num_observations: usize) -> PolicyGraph {
        fn walk(t: &PolicyTree, no: usize, ns: usize, nodes: &mut Vec<PolicyNode>) -> usize {
            let id = nodes.len();
            nodes.push(PolicyNode {
                action: t.action,
                edges: vec![id; no],
                values: vec![0.0; ns],
            });
            for (o, child) in &t.children {
                let c = walk(child, no, ns, nodes);
                nodes[id].edges[*o] = c;
            }
            id
        }
        let mut nodes = Vec::new();
        walk(self, num_observations, num_states, &mut nodes);
        PolicyGraph { nodes, initial: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: f64,
    pub policies: u64,
    pub best: PolicyTree,
}

/// Unnormalized belief as sparse `(state, mass)` pairs.
type Mass = Vec<(usize, f64)>;

struct Oracle<'a> {
    m: &'a Pomdp,
    gamma: f64,
}

/// All policy values for one history node, laid out action block by
/// action block; inside a block, children form a mixed-radix number with
/// the first child most significant.
struct Subtrees {
    values: Vec<f64>,
    blocks: Vec<Block>,
}

struct Block {
    action: usize,
    start: usize,
    children: Vec<(usize, Subtrees)>,
}

impl Oracle<'_> {
    fn step(&self, b: &Mass, action: usize) -> (f64, Vec<(usize, Mass)>) {
        let m = self.m;
        let mut immediate = 0.0;
        let mut by_obs: Vec<Mass> = vec![Vec::new(); m.num_observations()];
        for &(s, w) in b {
            for &(t, p) in m.mdp().row(s, action) {
                if p == 0.0 {
                    continue;
                }
                immediate += w * p * m.model.reward(s, action, t);
                let bucket = &mut by_obs[m.obs[t]];
                match bucket.iter_mut().find(|(u, _)| *u == t) {
                    Some(e) => e.1 += w * p,
                    None => bucket.push((t, w * p)),
                }
            }
        }
        let children = by_obs
            .into_iter()
            .enumerate()
            .filter(|(_, mass)| mass.iter().any(|(_, w)| *w > 0.0))
            .collect();
        (immediate, children)
    }

    fn count(&self, b: &Mass, depth: usize) -> u64 {
        if depth == 0 {
            return 1;
        }
        let mut total: u64 = 0;
        for a in 0..self.m.num_actions() {
            let (_, children) = self.step(b, a);
            let mut product: u64 = 1;
            for (_, child) in &children {
                product = product.saturating_mul(self.count(child, depth - 1));
                if product > POLICY_LIMIT {
                    return u64::MAX;
                }
            }
            total = total.saturating_add(product);
            if total > POLICY_LIMIT {
                return u64::MAX;
            }
        }
        total
    }

    fn enumerate(&self, b: &Mass, depth: usize) -> Subtrees {
        if depth == 0 {
            return Subtrees {
                values: vec![0.0],
                blocks: Vec::new(),
            };
        }
        let mut values = Vec::new();
        let mut blocks = Vec::new();
        for a in 0..self.m.num_actions() {
            let (immediate, children) = self.step(b, a);
            let children: Vec<(usize, Subtrees)> = children
                .into_iter()
                .map(|(o, mass)| (o, self.enumerate(&mass, depth - 1)))
                .collect();
            let mut combos = vec![immediate];
            for (_, child) in &children {
                combos = combos
                    .iter()
                    .flat_map(|x| child.values.iter().map(move |y| x + self.gamma * y))
                    .collect();
            }
            blocks.push(Block {
                action: a,
                start: values.len(),
                children,
            });
            values.extend(combos);
        }
        Subtrees { values, blocks }
    }
}

impl Subtrees {
    fn decode(&self, index: usize) -> Option<PolicyTree> {
        let block = self.blocks.iter().rev().find(|b| b.start <= index)?;
        let mut rest = index - block.start;
        let mut picks = vec![0; block.children.len()];
        for (k, (_, child)) in block.children.iter().enumerate().rev() {
            picks[k] = rest % child.values.len();
            rest /= child.values.len();
        }
        let children = block
            .children
            .iter()
            .zip(picks)
            .filter_map(|((o, child), pick)| child.decode(pick).map(|t| (*o, t)))
            .collect();
        Some(PolicyTree {
            action: block.action,
            children,
        })
    }
}

/// Number of deterministic depth-`horizon` policy trees, saturating above
/// [`POLICY_LIMIT`].
pub fn count_policies(m: &Pomdp, horizon: usize) -> u64 {
    let b: Mass = initial_mass(m);
    Oracle { m, gamma: 1.0 }.count(&b, horizon)
}

fn initial_mass(m: &Pomdp) -> Mass {
    m.init()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(s, p)| (s, *p))
        .collect()
}

/// Optimal expected `horizon`-step reward by exhaustive enumeration of
/// deterministic observation-history policies (undiscounted).
pub fn brute_force_value(m: &Pomdp, horizon: usize) -> Result<OracleResult> {
    brute_force_value_discounted(m, horizon, 1.0)
}

pub fn brute_force_value_discounted(m: &Pomdp, horizon: usize, gamma: f64) -> Result<OracleResult> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let oracle = Oracle { m, gamma };
    let b = initial_mass(m);
    let policies = oracle.count(&b, horizon);
    if policies > POLICY_LIMIT {
        return Err(Error::PolicySpaceTooLarge(policies, POLICY_LIMIT));
    }
    let all = oracle.enumerate(&b, horizon);
    let mut best = 0;
    for (i, v) in all.values.iter().enumerate() {
        if *v > all.values[best] {
            best = i;
        }
    }
    Ok(OracleResult {
        value: all.values[best],
        policies,
        best: all.decode(best).expect("horizon >= 1"),
    })
}

/// Best memoryless deterministic policy (one action per observation) by
/// enumeration; returns the value and the action of every observation.
pub fn best_memoryless_value(m: &Pomdp, horizon: usize) -> Result<(f64, Vec<usize>)> {
    let (na, no, ns) = (m.num_actions(), m.num_observations(), m.num_states());
    let count = (na as u64).checked_pow(no as u32).unwrap_or(u64::MAX);
    if count > POLICY_LIMIT {
        return Err(Error::PolicySpaceTooLarge(count, POLICY_LIMIT));
    }
    let mut choice = vec![0usize; no];
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..count {
        let mut v = vec![0.0; ns];
        for _ in 0..horizon {
            v = (0..ns)
                .map(|s| {
                    let a = choice[m.obs[s]];
                    m.mdp()
                        .row(s, a)
                        .iter()
                        .map(|&(t, p)| p * (m.model.reward(s, a, t) + v[t]))
                        .sum()
                })
                .collect();
        }
        let value: f64 = m.init().iter().zip(&v).map(|(i, x)| i * x).sum();
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, choice.clone()));
        }
        for digit in choice.iter_mut() {
            *digit += 1;
            if *digit < na {
                break;
            }
            *digit = 0;
        }
    }
    Ok(best.expect("at least one policy"))
}
