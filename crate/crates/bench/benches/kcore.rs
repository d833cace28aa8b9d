use agsgr_bench::random_graph;
use agsgr_core::graph::core_decomposition;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn kcore(c: &mut Criterion) {
    let mut g = c.benchmark_group("core_decomposition");
    for n in [10_000u64, 100_000] {
        let graph = random_graph(n, 10.0, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &graph, |b, graph| {
            b.iter(|| core_decomposition(black_box(graph)))
        });
    }
    g.finish();
}

criterion_group!(benches, kcore);
criterion_main!(benches);
