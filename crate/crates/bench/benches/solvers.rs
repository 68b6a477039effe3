use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pmdp_cli::builtin_model;
use pmdp_core::{discretize_uniform, induce_pomdp, ip_solve, pbvi_solve, Pomdp};

fn encoded(name: &str, n: usize) -> Pomdp {
    let (m, target) = builtin_model(name).unwrap();
    let pts = discretize_uniform(&m, n).unwrap();
    induce_pomdp(&m, &pts, target).unwrap().0
}

fn encoding(c: &mut Criterion) {
    let (m, target) = builtin_model("learner").unwrap();
    let mut g = c.benchmark_group("induce_pomdp");
    for n in [10, 100, 1000] {
        let pts = discretize_uniform(&m, n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter(|| induce_pomdp(black_box(&m), pts, target).unwrap())
        });
    }
    g.finish();
}

fn incremental_pruning(c: &mut Criterion) {
    let mut g = c.benchmark_group("ip_learner_h3");
    for n in [10, 100, 1000] {
        let m = encoded("learner", n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| ip_solve(m, 3, 1.0).unwrap()));
    }
    g.finish();

    let m = encoded("repeated-learner", 10);
    let mut g = c.benchmark_group("ip_repeated_learner_10pts");
    for h in [9, 21, 39] {
        g.bench_with_input(BenchmarkId::from_parameter(h), &h, |b, &h| b.iter(|| ip_solve(&m, h, 1.0).unwrap()));
    }
    g.finish();
}

fn point_based(c: &mut Criterion) {
    let mut g = c.benchmark_group("pbvi_100_beliefs");
    g.sample_size(20);
    for (name, n, h) in [("repeated-learner", 10, 21), ("grid1", 10, 10), ("grid2", 5, 10)] {
        let m = encoded(name, n);
        g.bench_with_input(BenchmarkId::new(name, format!("{n}pts-h{h}")), &m, |b, m| {
            b.iter(|| pbvi_solve(m, h, 100, 0, 1.0).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, encoding, incremental_pruning, point_based);
criterion_main!(benches);
