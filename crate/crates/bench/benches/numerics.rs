use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use starmax_core::graphons::random_step_graphon;
use starmax_core::{crossover, membership_scan, q_eval, star_bound, FunctionOracle};

fn crossovers(c: &mut Criterion) {
    let mut group = c.benchmark_group("crossover");
    for k in [3u32, 50, 400] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| crossover(black_box(k), 1e-15).unwrap())
        });
    }
    group.finish();
}

fn q_evaluation(c: &mut Criterion) {
    c.bench_function("q_eval k=200", |b| {
        b.iter(|| q_eval(black_box(200), black_box(0.01)).unwrap())
    });
}

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("membership_scan");
    group.sample_size(10);
    let square = FunctionOracle::power(2).unwrap();
    let smooth: FunctionOracle = "smooth:0.02:0,0;1/2,1/4;1,1".parse().unwrap();
    group.bench_function("power:2 grid 40", |b| {
        b.iter(|| membership_scan(&square, black_box(40)).unwrap())
    });
    group.bench_function("smoothed grid 40", |b| {
        b.iter(|| membership_scan(&smooth, black_box(40)).unwrap())
    });
    group.finish();
}

fn graphon_bound(c: &mut Criterion) {
    let w = random_step_graphon(6, 0.45, 7).unwrap();
    c.bench_function("star density vs bound, 6 parts", |b| {
        b.iter(|| {
            let gamma = w.edge_density();
            (2..=8).all(|k| w.star_density(k) <= star_bound(k, gamma).unwrap().bound + 1e-9)
        })
    });
}

criterion_group!(benches, crossovers, q_evaluation, scan, graphon_bound);
criterion_main!(benches);
