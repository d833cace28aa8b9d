use agsgr_bench::{random_group, random_pois};
use agsgr_core::spatial::{brute_force_ann, minimum_enclosing_circle, spa_df, SpatialIndex};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn ann(c: &mut Criterion) {
    let mut g = c.benchmark_group("ann_k10_group5");
    for n in [10_000usize, 100_000] {
        let pois = random_pois(n, 20_000.0, 1);
        let index = SpatialIndex::build(pois.clone());
        let group = random_group(5, 20_000.0, 1_000.0, 2);
        g.bench_with_input(BenchmarkId::new("spa_df", n), &n, |b, _| {
            b.iter(|| spa_df(black_box(&index), black_box(&group), 10).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("linear_scan", n), &n, |b, _| {
            b.iter(|| brute_force_ann(black_box(&pois), black_box(&group), 10).unwrap())
        });
    }
    g.finish();
}

fn build(c: &mut Criterion) {
    let pois = random_pois(100_000, 20_000.0, 3);
    c.bench_function("index_build_100k", |b| b.iter(|| SpatialIndex::build(black_box(pois.clone()))));
}

fn mec(c: &mut Criterion) {
    let pts = random_group(1_000, 20_000.0, 5_000.0, 4);
    c.bench_function("mec_1000", |b| b.iter(|| minimum_enclosing_circle(black_box(&pts))));
}

criterion_group!(benches, ann, build, mec);
criterion_main!(benches);
