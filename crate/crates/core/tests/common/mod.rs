#![allow(dead_code)]

use proptest::prelude::*;

use pmdp_core::model::{Mdp, RewardedMdp};
use pmdp_core::parser::{parse_pmdp, ModelSource};
use pmdp_core::{discretize_uniform, induce_pomdp, EncodingMap, ParamPointSet, Pmdp, Pomdp};

pub const LEARNER: &str = "\
pmdp learner
param p in [0,1]
state s m a b c t x
action e a b c
init s:1
target t
trans s e a:p, b:1-p
trans a e c:1
trans b e c:1
trans c a t:p, x:1-p
trans c b t:1-p, x:p
";

/// The learner with a restart edge from c back to s.
pub const REPEATED_LEARNER: &str = "\
pmdp repeated
param p in [0,1]
state s m a b c t x
action e a b c
init s:1
target t
trans s e a:p, b:1-p
trans a e c:1
trans b e c:1
trans c a t:p, x:1-p
trans c b t:1-p, x:p
trans c c s:1
";

pub fn parsed(text: &str) -> (Pmdp, usize) {
    let p = parse_pmdp(&ModelSource::new(text, "test")).unwrap();
    let t = p.target.unwrap();
    (p.pmdp, t)
}

pub struct Instance {
    pub pmdp: Pmdp,
    pub target: usize,
    pub pts: ParamPointSet,
    pub pomdp: Pomdp,
    pub map: EncodingMap,
}

pub fn instance(text: &str, n: usize) -> Instance {
    let (pmdp, target) = parsed(text);
    let pts = discretize_uniform(&pmdp, n).unwrap();
    let (pomdp, map) = induce_pomdp(&pmdp, &pts, target).unwrap();
    Instance { pmdp, target, pts, pomdp, map }
}

pub fn learner(n: usize) -> Instance {
    instance(LEARNER, n)
}

pub fn normalized(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

fn distribution(weights: Vec<f64>) -> Vec<(usize, f64)> {
    let total: f64 = weights.iter().sum();
    weights.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(i, w)| (i, w / total)).collect()
}

/// Small POMDPs with sparse random dynamics, rewards in [0,1] and a
/// state-based observation function.
pub fn arb_pomdp() -> impl Strategy<Value = Pomdp> {
    (2usize..5, 1usize..3, 1usize..4).prop_flat_map(|(ns, na, no)| {
        let rows = proptest::collection::vec(
            proptest::collection::vec(prop_oneof![Just(0.0), 0.1f64..1.0], ns),
            ns * na,
        );
        let rewards = proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, ns), ns * na);
        let obs = proptest::collection::vec(0..no, ns);
        let init = proptest::collection::vec(0.05f64..1.0, ns);
        (Just((ns, na, no)), rows, rewards, obs, init).prop_map(|((ns, na, no), rows, rewards, obs, init)| {
            let rows: Vec<Vec<(usize, f64)>> = rows
                .into_iter()
                .enumerate()
                .map(|(i, mut w)| {
                    // Never an empty row: fall back to a self-loop.
                    if w.iter().all(|x| *x == 0.0) {
                        w[i / na] = 1.0;
                    }
                    distribution(w)
                })
                .collect();
            let rewards: Vec<Vec<(usize, f64)>> = rewards
                .iter()
                .zip(&rows)
                .map(|(r, row)| row.iter().map(|&(t, _)| (t, r[t])).collect())
                .collect();
            let mdp = Mdp {
                states: (0..ns).map(|s| format!("s{s}")).collect(),
                actions: (0..na).map(|a| format!("a{a}")).collect(),
                rows,
                init: normalized(&init),
            };
            Pomdp::new(
                "random",
                RewardedMdp { mdp, rewards },
                (0..no).map(|o| format!("o{o}")).collect(),
                obs,
            )
            .unwrap()
        })
    })
}
