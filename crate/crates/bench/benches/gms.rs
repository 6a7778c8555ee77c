use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gms_bench::{contraction, partial_space, worked_example};
use gms_core::solvers::{estimate_constants, pair_terms};
use gms_core::{min_coefficient, search_separation, solve, verify_axioms, Family, IterOptions, Point, SearchGoal, SearchTarget, Theorem};

fn verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_worked_example");
    group.sample_size(10);
    for v in [3, 4, 5] {
        let (d, p) = worked_example(12, v);
        group.bench_with_input(BenchmarkId::from_parameter(v), &v, |b, _| b.iter(|| verify_axioms(&d, &p).unwrap()));
    }
    group.finish();
}

fn classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("min_coefficient_partial");
    for n in [6, 8, 10] {
        let (d, _) = partial_space(n, 2, 2.0, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| min_coefficient(&d, 2, Family::Partial, false).unwrap())
        });
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for theorem in [Theorem::BanachPartial, Theorem::KannanPartial, Theorem::ReichTheta, Theorem::WeakTheta] {
        let inst = contraction(theorem, 8, 3);
        group.bench_function(theorem.token(), |b| {
            b.iter(|| solve(&inst.problem, &inst.profile, Point::Index(0), &IterOptions::default(), false).unwrap())
        });
    }
    let reich = contraction(Theorem::ReichTheta, 8, 3);
    group.bench_function("estimate_reich", |b| b.iter(|| estimate_constants(&reich.problem, Theorem::ReichTheta)));
    group.bench_function("pair_terms", |b| b.iter(|| pair_terms(&reich.problem)));
    group.finish();
}

fn search(c: &mut Criterion) {
    let target = SearchTarget { goal: SearchGoal::PartialBvsNotBvs, n: 5, v: 2, s: 2.0, budget: 1000, seed: 42 };
    c.bench_function("search_partial_bvs_not_bvs", |b| b.iter(|| search_separation(&target).unwrap()));
}

criterion_group!(benches, verify, classify, solvers, search);
criterion_main!(benches);
