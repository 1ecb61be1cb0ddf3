use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qidiode_core::oracle::{build_chain_hamiltonian, otoc_exact, spectral_decompose, ExactChain};
use qidiode_core::{
    build_mode_set, omega_sum, otoc_series, rectification_coefficient, ModelParams, QuadratureSettings, Side, TimeGrid,
};

fn omega_sums(c: &mut Criterion) {
    let set = build_mode_set(&ModelParams::default()).unwrap();
    c.bench_function("omega_sum/n1000", |b| {
        b.iter(|| omega_sum(black_box(&set), 0.01, black_box(7.3), Side::Left))
    });
}

fn series(c: &mut Criterion) {
    let params = ModelParams::default();
    let grid = TimeGrid::new(0.03, 1000).unwrap();
    c.bench_function("otoc_series/n1000x1000", |b| {
        b.iter(|| otoc_series(black_box(&params), 0.01, &grid, None).unwrap())
    });
}

fn rectification(c: &mut Criterion) {
    let params = ModelParams::default();
    let quad = QuadratureSettings {
        t_truncation: Some(60.0),
        dt: None,
    };
    c.bench_function("rectification/t60", |b| {
        b.iter(|| rectification_coefficient(black_box(&params), 0.01, &quad).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for n in [16usize, 32, 64, 128] {
        let h = build_chain_hamiltonian(&ModelParams::default(), n).unwrap();
        group.bench_with_input(BenchmarkId::new("decompose", n), &h, |b, h| {
            b.iter(|| spectral_decompose(h).unwrap())
        });
        let chain = ExactChain::new(h).unwrap();
        group.bench_with_input(BenchmarkId::new("otoc_exact", n), &chain, |b, chain| {
            b.iter(|| otoc_exact(chain, 0, 3, black_box(4.2)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, omega_sums, series, rectification, oracle);
criterion_main!(benches);
