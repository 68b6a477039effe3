mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{arb_pomdp, learner, normalized, instance, REPEATED_LEARNER};
use pmdp_core::policy::brute_force_value;
use pmdp_core::solver::{
    belief_update, exact_backup, ip_solve_stages, reachable_backup_with, reachable_faces, sample_beliefs,
};
use pmdp_core::solver::lp::DenseSimplex;
use pmdp_core::{initial_belief, ip_solve, pbvi_solve, Belief, Error, Pomdp, StageValueFunction};

fn stages_full(m: &Pomdp, h: usize) -> Vec<StageValueFunction> {
    let mut stages = vec![StageValueFunction::terminal(m.num_states(), m.num_observations())];
    for _ in 0..h {
        let next = exact_backup(m, stages.last().unwrap(), 1.0).unwrap();
        stages.push(next);
    }
    stages
}

/// Right-hand side of the Bellman equation at `b`, from Bayes updates.
fn bellman_rhs(m: &Pomdp, prev: &StageValueFunction, b: &[f64]) -> f64 {
    let belief = Belief::new(b.to_vec()).unwrap();
    (0..m.num_actions())
        .map(|a| {
            let mut total = 0.0;
            for s in 0..m.num_states() {
                for &(t, p) in m.mdp().row(s, a) {
                    total += b[s] * p * m.model.reward(s, a, t);
                }
            }
            for o in 0..m.num_observations() {
                match belief_update(m, &belief, a, o) {
                    Ok((post, pr)) => total += pr * prev.value_at(post.probs()).0,
                    Err(Error::ImpossibleObservation) => {}
                    Err(e) => panic!("{e}"),
                }
            }
            total
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn random_beliefs(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            // Exponential weights give a uniform draw from the simplex.
            let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            normalized(&raw)
        })
        .collect()
}

#[test]
fn bellman_consistency_on_the_learner() {
    for (text, n, h) in [(common::LEARNER, 2, 4), (common::LEARNER, 3, 4), (REPEATED_LEARNER, 3, 6)] {
        let inst = instance(text, n);
        let stages = stages_full(&inst.pomdp, h);
        for k in 1..=h {
            for b in random_beliefs(inst.pomdp.num_states(), 200, k as u64) {
                let lhs = stages[k].value_at(&b).0;
                let rhs = bellman_rhs(&inst.pomdp, &stages[k - 1], &b);
                assert!((lhs - rhs).abs() <= 1e-9, "stage {k}: {lhs} vs {rhs}");
            }
        }
    }
}

/// Every plan `(a, successor per observation)`, unpruned.
fn all_plan_vectors(m: &Pomdp, next: &StageValueFunction) -> Vec<Vec<f64>> {
    let (ns, no, nj) = (m.num_states(), m.num_observations(), next.alphas.len());
    let mut out = Vec::new();
    for a in 0..m.num_actions() {
        let mut succ = vec![0usize; no];
        loop {
            out.push(
                (0..ns)
                    .map(|s| {
                        m.mdp()
                            .row(s, a)
                            .iter()
                            .map(|&(t, p)| p * (m.model.reward(s, a, t) + next.alphas[succ[m.obs[t]]].values[t]))
                            .sum()
                    })
                    .collect(),
            );
            let mut carry = true;
            for d in succ.iter_mut() {
                *d += 1;
                if *d < nj {
                    carry = false;
                    break;
                }
                *d = 0;
            }
            if carry {
                break;
            }
        }
    }
    out
}

#[test]
fn pruning_preserves_the_unpruned_envelope() {
    let inst = learner(2);
    let m = &inst.pomdp;
    let stages = stages_full(m, 3);
    for k in 1..=3 {
        assert!(stages[k - 1].alphas.len() <= 4, "enumeration would be too large");
        let plans = all_plan_vectors(m, &stages[k - 1]);
        for b in random_beliefs(m.num_states(), 1000, 40 + k as u64) {
            let full = plans.iter().map(|v| v.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
            assert!((full - stages[k].value_at(&b).0).abs() <= 1e-9);
        }
    }
}

#[test]
fn zero_stage_backup_of_the_learner_has_no_value() {
    let inst = learner(2);
    let s1 = exact_backup(&inst.pomdp, &StageValueFunction::terminal(14, 7), 1.0).unwrap();
    assert_eq!(s1.value_at(inst.pomdp.init()).0, 0.0);
}

#[test]
fn learner_exact_values() {
    for (n, expected) in [(2, 1.0), (5, 0.75), (10, 19.0 / 27.0)] {
        let r = ip_solve(&learner(n).pomdp, 3, 1.0).unwrap();
        assert!((r.value - expected).abs() < 1e-9, "{n} points: {}", r.value);
        r.policy.check().unwrap();
    }
}

#[test]
fn ip_agrees_with_full_simplex_backups_at_the_initial_belief() {
    let inst = instance(REPEATED_LEARNER, 4);
    let full = stages_full(&inst.pomdp, 9);
    let faces = ip_solve_stages(&inst.pomdp, 9, 1.0, &DenseSimplex::default()).unwrap();
    for k in 1..=9 {
        let a = full[k].value_at(inst.pomdp.init()).0;
        let b = faces[k].value_at(inst.pomdp.init()).0;
        assert!((a - b).abs() <= 1e-9, "stage {k}: {a} vs {b}");
    }
}

#[test]
fn reachable_backup_is_exact_on_faces_and_below_elsewhere() {
    let inst = instance(REPEATED_LEARNER, 3);
    let m = &inst.pomdp;
    let faces = reachable_faces(m);
    assert_eq!(faces.len(), 7);
    let lp = DenseSimplex::default();
    let mut full = StageValueFunction::terminal(m.num_states(), m.num_observations());
    let mut restricted = full.clone();
    for k in 1..=7 {
        full = exact_backup(m, &full, 1.0).unwrap();
        restricted = reachable_backup_with(m, &restricted, 1.0, &lp).unwrap();
        for (i, face) in faces.iter().enumerate() {
            for raw in random_beliefs(face.len(), 50, (k * 10 + i) as u64) {
                let mut b = vec![0.0; m.num_states()];
                for (&s, p) in face.iter().zip(&raw) {
                    b[s] = *p;
                }
                assert!((full.value_at(&b).0 - restricted.value_at(&b).0).abs() <= 1e-9);
            }
        }
        for b in random_beliefs(m.num_states(), 200, 99 + k as u64) {
            assert!(restricted.value_at(&b).0 <= full.value_at(&b).0 + 1e-9);
        }
    }
}

#[test]
fn ip_matches_the_enumeration_oracle_on_the_learner() {
    for n in [2, 3, 5] {
        let m = learner(n).pomdp;
        let ip = ip_solve(&m, 3, 1.0).unwrap().value;
        let oracle = brute_force_value(&m, 3).unwrap().value;
        assert!((ip - oracle).abs() <= 1e-9, "{n} points: {ip} vs {oracle}");
    }
}

#[test]
fn value_is_monotone_in_horizon() {
    let m = instance(REPEATED_LEARNER, 5).pomdp;
    let stages = ip_solve_stages(&m, 16, 1.0, &DenseSimplex::default()).unwrap();
    for k in 1..stages.len() {
        assert!(stages[k].value_at(m.init()).0 >= stages[k - 1].value_at(m.init()).0 - 1e-12);
    }
    let mut last = 0.0;
    for h in 1..=12 {
        let v = pbvi_solve(&m, h, 60, 3, 1.0).unwrap().value;
        assert!(v >= last - 1e-12, "h={h}: {v} < {last}");
        last = v;
    }
}

#[test]
fn pbvi_finds_the_two_point_optimum() {
    let m = learner(2).pomdp;
    for n in [15, 30, 100] {
        let r = pbvi_solve(&m, 3, n, 7, 1.0).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn pbvi_bounds_ip_from_below_on_the_learner() {
    for n in [5, 10, 20] {
        let m = learner(n).pomdp;
        let ip = ip_solve(&m, 3, 1.0).unwrap().value;
        for seed in 0..3 {
            for beliefs in [10, 50, 100] {
                assert!(pbvi_solve(&m, 3, beliefs, seed, 1.0).unwrap().value <= ip + 1e-9);
            }
        }
    }
}

#[test]
fn solvers_are_deterministic() {
    let m = instance(REPEATED_LEARNER, 5).pomdp;
    let a = pbvi_solve(&m, 9, 80, 11, 1.0).unwrap();
    let b = pbvi_solve(&m, 9, 80, 11, 1.0).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.policy, b.policy);
    let c = ip_solve(&m, 9, 1.0).unwrap();
    let d = ip_solve(&m, 9, 1.0).unwrap();
    assert_eq!(c.value.to_bits(), d.value.to_bits());
    assert_eq!(c.policy, d.policy);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let e = pool.install(|| pbvi_solve(&m, 9, 80, 11, 1.0).unwrap());
    assert_eq!(a.value.to_bits(), e.value.to_bits());
}

#[test]
fn belief_update_through_the_a_branch_identifies_the_point() {
    let inst = learner(2);
    let m = &inst.pomdp;
    let (e, a_obs, c_obs) = (0, 2, 4);
    let (b1, pr1) = belief_update(m, &initial_belief(m), e, a_obs).unwrap();
    assert!((pr1 - 0.5).abs() < 1e-15);
    let (b2, pr2) = belief_update(m, &b1, e, c_obs).unwrap();
    assert_eq!(pr2, 1.0);
    assert_eq!(b2.probs()[inst.map.forward(c_obs, 1)], 1.0);
}

#[test]
fn belief_update_keeps_an_absorbed_target() {
    let inst = learner(3);
    let m = &inst.pomdp;
    let t = inst.map.forward(inst.target, 1);
    for a in 0..m.num_actions() {
        let (post, pr) = belief_update(m, &Belief::dirac(m.num_states(), t), a, inst.target).unwrap();
        assert_eq!(pr, 1.0);
        assert_eq!(post, Belief::dirac(m.num_states(), t));
    }
    let err = belief_update(m, &Belief::dirac(m.num_states(), t), 0, 0).unwrap_err();
    assert!(matches!(err, Error::ImpossibleObservation));
}

#[test]
fn a_branch_posterior_favours_large_biases() {
    let inst = learner(10);
    let m = &inst.pomdp;
    let (post, _) = belief_update(m, &initial_belief(m), 0, 2).unwrap();
    let weights: Vec<f64> = (0..10).map(|k| post.probs()[inst.map.forward(2, k)]).collect();
    assert!(weights.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn sample_beliefs_starts_with_corners_and_midpoint() {
    let inst = learner(2);
    let m = &inst.pomdp;
    let ns = m.num_states();
    let few = sample_beliefs(m, 3, 0);
    assert_eq!(few.len(), ns + 1);
    for (s, b) in few.iter().take(ns).enumerate() {
        assert_eq!(*b, Belief::dirac(ns, s));
    }
    assert_eq!(few[ns], Belief::uniform(ns));

    let many = sample_beliefs(m, 20, 5);
    assert!(many.len() <= 20 && many.len() > ns + 1);
    for b in &many[ns + 1..] {
        // Forward-simulated beliefs live inside one observation class.
        let classes: std::collections::BTreeSet<usize> =
            b.probs().iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(s, _)| m.obs[s]).collect();
        assert!(classes.len() <= 1 || *b == initial_belief(m));
    }
    for (i, x) in many.iter().enumerate() {
        for y in &many[i + 1..] {
            assert!(x.l1_distance(y) > 1e-9);
        }
    }
}

#[test]
fn two_state_sampling_example() {
    let inst = instance("pmdp two\nstate u v\naction go\ninit u:1\ntarget v\ntrans u go v:1\n", 1);
    let m = &inst.pomdp;
    assert_eq!(m.num_states(), 2);
    let b = sample_beliefs(m, 3, 0);
    assert_eq!(b, vec![Belief::dirac(2, 0), Belief::dirac(2, 1), Belief::uniform(2)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ip_equals_the_oracle_on_random_pomdps(m in arb_pomdp(), h in 1usize..4) {
        let oracle = brute_force_value(&m, h).unwrap().value;
        let ip = ip_solve(&m, h, 1.0).unwrap().value;
        prop_assert!((ip - oracle).abs() <= 1e-9, "ip {ip} oracle {oracle}");
        let full = stages_full(&m, h);
        prop_assert!((full[h].value_at(m.init()).0 - oracle).abs() <= 1e-9);
    }

    #[test]
    fn bellman_consistency_on_random_pomdps(m in arb_pomdp(), seed in 0u64..1000) {
        let stages = stages_full(&m, 3);
        for k in 1..=3 {
            for b in random_beliefs(m.num_states(), 30, seed + k as u64) {
                let lhs = stages[k].value_at(&b).0;
                let rhs = bellman_rhs(&m, &stages[k - 1], &b);
                prop_assert!((lhs - rhs).abs() <= 1e-9, "stage {k}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn pbvi_never_exceeds_ip(m in arb_pomdp(), h in 1usize..5, n in 1usize..30, seed in 0u64..50) {
        let ip = ip_solve(&m, h, 1.0).unwrap().value;
        let pbvi = pbvi_solve(&m, h, n, seed, 1.0).unwrap().value;
        prop_assert!(pbvi <= ip + 1e-9, "pbvi {pbvi} ip {ip}");
    }

    #[test]
    fn extracted_graphs_reproduce_their_value(m in arb_pomdp(), h in 1usize..5) {
        let r = ip_solve(&m, h, 1.0).unwrap();
        r.policy.check().unwrap();
        let v = pmdp_core::policy::evaluate_on_pomdp(&m, &r.policy, h, 1.0).unwrap();
        prop_assert!((v - r.value).abs() <= 1e-9);
    }
}
