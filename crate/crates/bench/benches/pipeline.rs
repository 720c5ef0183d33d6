use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use schoolchoice::lottery::{self, DEFAULT_SUPPORT_BOUND};
use schoolchoice::stable_matching::{self, TieBreakRule};
use schoolchoice::{format, full_audit, GroupPartition, Lottery};
use schoolchoice_bench::{workload, SIZES};

fn deferred_acceptance(c: &mut Criterion) {
    let mut group = c.benchmark_group("deferred_acceptance");
    for (n, m) in SIZES {
        let p = workload(n, m, 0.5, 1);
        let t = TieBreakRule::seeded(&p, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(p, t), |b, (p, t)| {
            b.iter(|| stable_matching::deferred_acceptance(black_box(p), black_box(t)))
        });
    }
    group.finish();
}

fn constrained_efficient(c: &mut Criterion) {
    let mut group = c.benchmark_group("constrained_efficient");
    for (n, m) in SIZES {
        let p = workload(n, m, 0.7, 2);
        let t = TieBreakRule::seeded(&p, 2);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(p, t), |b, (p, t)| {
            b.iter(|| stable_matching::constrained_efficient_matching(black_box(p), black_box(t)))
        });
    }
    group.finish();
}

fn marginal_reassignment(c: &mut Criterion) {
    let mut group = c.benchmark_group("ete_marginals");
    for (n, m) in SIZES {
        let p = workload(n, m, 0.7, 3);
        let g = GroupPartition::compute(&p);
        let mu = stable_matching::constrained_efficient_matching(&p, &TieBreakRule::seeded(&p, 3));
        let rm = Lottery::degenerate(mu).marginals();
        group.bench_with_input(BenchmarkId::from_parameter(n), &(g, rm), |b, (g, rm)| {
            b.iter(|| lottery::ete_reassignment_marginals(black_box(g), black_box(rm)))
        });
    }
    group.finish();
}

fn example_pipeline(c: &mut Criterion) {
    let ex = format::example1();
    let t = TieBreakRule::seeded(&ex.problem, 0);
    c.bench_function("example_solve_and_audit", |b| {
        b.iter(|| {
            let (_, lot) =
                schoolchoice::solve(&ex.problem, &ex.groups, &t, DEFAULT_SUPPORT_BOUND).unwrap();
            full_audit(&ex.problem, &ex.groups, black_box(&lot))
        })
    });
}

criterion_group!(
    benches,
    deferred_acceptance,
    constrained_efficient,
    marginal_reassignment,
    example_pipeline
);
criterion_main!(benches);
