use crate::error::{Error, Result};
use crate::model::check_distribution;

/// One sparse row of a transition function: `(target state, probability)`.
pub type Row = Vec<(usize, f64)>;

/// A finite MDP with every action enabled in every state.
///
/// Rows are stored state-major: the row of `(s, a)` lives at
/// `s * num_actions + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub rows: Vec<Row>,
    pub init: Vec<f64>,
}

impl Mdp {
    pub fn new(states: Vec<String>, actions: Vec<String>, rows: Vec<Row>, init: Vec<f64>) -> Result<Self> {
        let m = Mdp { states, actions, rows, init };
        m.check()?;
        Ok(m)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn row(&self, state: usize, action: usize) -> &Row {
        &self.rows[state * self.actions.len() + action]
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn action_index(&self, name: &str) -> Result<usize> {
        self.actions
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    /// Checks that every row and the initial distribution are distributions.
    pub fn check(&self) -> Result<()> {
        let n = self.states.len();
        if self.rows.len() != n * self.actions.len() {
            return Err(Error::Validation(format!(
                "expected {} transition rows, found {}",
                n * self.actions.len(),
                self.rows.len()
            )));
        }
        if self.init.len() != n {
            return Err(Error::Validation("initial distribution has wrong length".into()));
        }
        check_distribution(self.init.iter().copied())
            .map_err(|e| Error::Validation(format!("initial distribution: {e}")))?;
        for (idx, row) in self.rows.iter().enumerate() {
            let (s, a) = (idx / self.actions.len(), idx % self.actions.len());
            if let Some(&(t, _)) = row.iter().find(|(t, _)| *t >= n) {
                return Err(Error::Validation(format!("row ({}, {}) targets state {t}", self.states[s], self.actions[a])));
            }
            check_distribution(row.iter().map(|(_, p)| *p)).map_err(|e| {
                Error::Validation(format!("row ({}, {}): {e}", self.states[s], self.actions[a]))
            })?;
        }
        Ok(())
    }
}

/// An MDP with a transition reward `R(s, a, s')`; unlisted triples pay 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardedMdp {
    pub mdp: Mdp,
    /// Sparse per-row rewards, aligned with `mdp.rows` by row index.
    pub rewards: Vec<Vec<(usize, f64)>>,
}

impl RewardedMdp {
    pub fn reward(&self, state: usize, action: usize, target: usize) -> f64 {
        self.rewards[state * self.mdp.num_actions() + action]
            .iter()
            .find(|(t, _)| *t == target)
            .map_or(0.0, |(_, r)| *r)
    }

    /// Exact expected accumulated reward over `horizon` steps under the
    /// optimal history-dependent policy (full observability).
    pub fn optimal_finite_horizon(&self, horizon: usize) -> Vec<f64> {
        let m = &self.mdp;
        let mut v = vec![0.0; m.num_states()];
        for _ in 0..horizon {
            let next: Vec<f64> = (0..m.num_states())
                .map(|s| {
                    (0..m.num_actions())
                        .map(|a| {
                            m.row(s, a)
                                .iter()
                                .map(|&(t, p)| p * (self.reward(s, a, t) + v[t]))
                                .sum::<f64>()
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            v = next;
        }
        v
    }
}

/// Makes `target` absorbing and pays 1 on every edge entering it.
///
/// With this reward the accumulated reward of a run equals the indicator of
/// reaching `target`, so expected reward is the reachability probability.
pub fn reachability_transform(m: &Mdp, target: usize) -> Result<RewardedMdp> {
    if target >= m.num_states() {
        return Err(Error::InvalidArgument(format!("target index {target} out of range")));
    }
    if m.init[target] != 0.0 {
        return Err(Error::Validation(format!(
            "initial probability of target `{}` must be 0, found {}",
            m.states[target], m.init[target]
        )));
    }
    let na = m.num_actions();
    let mut rows = m.rows.clone();
    let mut rewards = vec![Vec::new(); rows.len()];
    for a in 0..na {
        rows[target * na + a] = vec![(target, 1.0)];
    }
    for (idx, row) in rows.iter().enumerate() {
        if idx / na != target && row.iter().any(|&(t, p)| t == target && p > 0.0) {
            rewards[idx].push((target, 1.0));
        }
    }
    Ok(RewardedMdp {
        mdp: Mdp { rows, ..m.clone() },
        rewards,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chain() -> Mdp {
        Mdp::new(
            vec!["s".into(), "t".into()],
            vec!["go".into()],
            vec![vec![(1, 1.0)], vec![(0, 1.0)]],
            vec![1.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn one_step_chain_pays_once() {
        let r = reachability_transform(&chain(), 1).unwrap();
        assert_eq!(r.mdp.row(1, 0), &vec![(1, 1.0)]);
        assert_eq!(r.reward(0, 0, 1), 1.0);
        assert_eq!(r.reward(1, 0, 1), 0.0);
        assert_eq!(r.optimal_finite_horizon(1)[0], 1.0);
        assert_eq!(r.optimal_finite_horizon(5)[0], 1.0);
    }

    #[test]
    fn rejects_initial_target() {
        let m = chain();
        assert!(reachability_transform(&m, 0).is_err());
    }

    #[test]
    fn transform_is_idempotent() {
        let once = reachability_transform(&chain(), 1).unwrap();
        let twice = reachability_transform(&once.mdp, 1).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn check_catches_bad_rows() {
        let bad = Mdp::new(vec!["s".into()], vec!["a".into()], vec![vec![(0, 0.5)]], vec![1.0]);
        assert!(bad.is_err());
    }

    fn arb_mdp() -> impl Strategy<Value = (Mdp, usize)> {
        (2usize..6, 1usize..3).prop_flat_map(|(n, na)| {
            let row = proptest::collection::vec(0.0f64..1.0, n).prop_map(|w| {
                let total: f64 = w.iter().sum::<f64>() + 1e-3;
                w.iter()
                    .enumerate()
                    .map(|(t, x)| (t, x / total))
                    .chain(std::iter::once((0, 1e-3 / total)))
                    .collect::<Vec<_>>()
            });
            (proptest::collection::vec(row, n * na), Just(n), Just(na))
                .prop_map(|(rows, n, na)| {
                    let rows = rows
                        .into_iter()
                        .map(|r| {
                            let mut merged: Vec<(usize, f64)> = Vec::new();
                            for (t, p) in r {
                                match merged.iter_mut().find(|(u, _)| *u == t) {
                                    Some(e) => e.1 += p,
                                    None => merged.push((t, p)),
                                }
                            }
                            merged
                        })
                        .collect();
                    let mut init = vec![0.0; n];
                    init[0] = 1.0;
                    (
                        Mdp {
                            states: (0..n).map(|i| format!("s{i}")).collect(),
                            actions: (0..na).map(|i| format!("a{i}")).collect(),
                            rows,
                            init,
                        },
                        n - 1,
                    )
                })
        })
    }

    // Enumerates every run of length `h` under every open-loop action
    // sequence and checks the accumulated reward is 0 or 1.
    fn run_rewards(r: &RewardedMdp, h: usize) -> Vec<f64> {
        let m = &r.mdp;
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0usize, 0.0f64)];
        while let Some((s, depth, acc)) = stack.pop() {
            if depth == h {
                out.push(acc);
                continue;
            }
            for a in 0..m.num_actions() {
                for &(t, p) in m.row(s, a) {
                    if p > 0.0 {
                        stack.push((t, depth + 1, acc + r.reward(s, a, t)));
                    }
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn runs_accumulate_zero_or_one((m, target) in arb_mdp(), h in 1usize..5) {
            let r = reachability_transform(&m, target).unwrap();
            for acc in run_rewards(&r, h) {
                prop_assert!(acc == 0.0 || acc == 1.0, "accumulated {}", acc);
            }
            let again = reachability_transform(&r.mdp, target).unwrap();
            prop_assert_eq!(&again.mdp, &r.mdp);
        }
    }
}
