//! Backward-recursion return computation over a long logged run.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::prelude::*;

use nexting::oracle::compute_returns;

fn bench_returns(c: &mut Criterion) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let n = 120_000;
    let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let constant = vec![0.9875f64; n];
    let variable: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.05) { 0.1 } else { 0.95 })
        .collect();

    c.bench_function("returns/120k_constant_gamma", |b| {
        b.iter(|| black_box(compute_returns(&targets, &constant, 1e-6).unwrap()))
    });
    c.bench_function("returns/120k_variable_gamma", |b| {
        b.iter(|| black_box(compute_returns(&targets, &variable, 1e-6).unwrap()))
    });
}

criterion_group!(benches, bench_returns);
criterion_main!(benches);
