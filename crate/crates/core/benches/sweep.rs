//! Parallel vs sequential landscape sweeps.
//!
//! The per-amplitude minimizations are independent, so the sweep is the
//! data-parallel hot path. Run with `cargo bench -p excitable-core`.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use excitable_core::{
    linear_grid, log_grid, supplied_energy, sweep_landscape, sweep_landscape_serial, Ansatz,
    FhnParams, HhParams, ModelSpec, Tolerances,
};

fn bench_tolerances() -> Tolerances {
    Tolerances {
        rel_tol: 1e-5,
        refine_tol: 1e-3,
        steps_per_timescale: 30.0,
    }
}

fn fhn_sweep(c: &mut Criterion) {
    let spec = ModelSpec::Fhn(FhnParams::calibrated());
    let a_grid = linear_grid(0.1, 2.0, 24);
    let alpha_grid = log_grid(1.0, 500.0, 24);
    let tol = bench_tolerances();

    let mut group = c.benchmark_group("fhn_sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| sweep_landscape(&spec, black_box(&a_grid), &alpha_grid, &tol).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| sweep_landscape_serial(&spec, black_box(&a_grid), &alpha_grid, &tol).unwrap())
    });
    group.finish();
}

fn hh_sweep(c: &mut Criterion) {
    let spec = ModelSpec::Hh(HhParams::standard());
    let a_grid = linear_grid(4.0, 20.0, 12);
    let alpha_grid = log_grid(0.1, 10.0, 16);
    let tol = bench_tolerances();

    let mut group = c.benchmark_group("hh_sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| sweep_landscape(&spec, black_box(&a_grid), &alpha_grid, &tol).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| sweep_landscape_serial(&spec, black_box(&a_grid), &alpha_grid, &tol).unwrap())
    });
    group.finish();
}

fn hh_single_clamp(c: &mut Criterion) {
    let spec = ModelSpec::Hh(HhParams::standard());
    let ansatz = Ansatz::exponential(11.5, 0.62);
    let tol = Tolerances::default();

    c.bench_function("hh_clamp_single", |b| {
        b.iter(|| supplied_energy(&spec, black_box(&ansatz), &tol).unwrap())
    });
}

criterion_group!(benches, fhn_sweep, hh_sweep, hh_single_clamp);
criterion_main!(benches);
