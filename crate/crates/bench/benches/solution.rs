use std::hint::black_box;

use bixon_core::observables::lg_point;
use bixon_core::oracle::{integrate, IntegratorConfig};
use bixon_core::special::{gamma_lower_reg_seq, laguerre_d1};
use bixon_core::{AnalyticSolver, DoubleDouble, InitialState, ModelParams};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

fn special(c: &mut Criterion) {
    let mut group = c.benchmark_group("special");
    group.bench_function("laguerre_d1_16", |b| {
        b.iter(|| laguerre_d1(16, black_box(7.3f64)))
    });
    let z = Complex64::new(1.2, -3.4);
    let mut out = vec![Complex64::default(); 18];
    group.bench_function("gamma_lower_seq_17", |b| {
        b.iter(|| gamma_lower_reg_seq(black_box(z), (-z).exp(), &mut out))
    });
    group.finish();
}

fn survival(c: &mut Criterion) {
    let mut group = c.benchmark_group("survival");
    let p = ModelParams::new(0.24, 1.0, 0.4).with_k_max(16);
    let g = InitialState::ground();
    let double = AnalyticSolver::<f64>::new(&p).unwrap();
    let extended = AnalyticSolver::<DoubleDouble>::new(&p).unwrap();
    for t in [0.5, 3.5, 7.5, 15.5] {
        group.bench_with_input(BenchmarkId::new("double", t), &t, |b, &t| {
            b.iter(|| double.b(&g, black_box(t)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("extended", t), &t, |b, &t| {
            b.iter(|| extended.b(&g, black_box(t)).unwrap())
        });
    }
    group.finish();
}

fn full_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("state");
    group.sample_size(20);
    let init = InitialState::normalized(
        Complex64::new(0.8, 0.0),
        [
            (-1, Complex64::new(0.3, 0.2)),
            (2, Complex64::new(0.0, 0.4)),
        ],
    )
    .unwrap();
    for n_max in [100, 1000] {
        let p = ModelParams::new(0.24, 1.0, 0.4).with_n_max(n_max);
        let s = AnalyticSolver::<f64>::new(&p).unwrap();
        group.bench_with_input(BenchmarkId::new("t_3.5", n_max), &n_max, |b, _| {
            b.iter(|| s.state(&init, black_box(3.5)).unwrap())
        });
    }
    group.finish();
}

fn leggett_garg(c: &mut Criterion) {
    let mut group = c.benchmark_group("lg_point");
    group.sample_size(20);
    let p = ModelParams::new(0.0, 1.0, 0.4).with_k_max(16);
    let s = AnalyticSolver::<f64>::new(&p).unwrap();
    for tau in [1.25, 6.75] {
        group.bench_with_input(BenchmarkId::from_parameter(tau), &tau, |b, &tau| {
            b.iter(|| lg_point(&s, black_box(tau)).unwrap())
        });
    }
    group.finish();
}

fn integrator(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4");
    group.sample_size(10);
    let p = ModelParams::new(0.24, 1.0, 0.4).with_n_max(100);
    let cfg = IntegratorConfig::default();
    group.bench_function("n_max_100_to_t_1", |b| {
        b.iter(|| integrate(&p, &InitialState::ground(), black_box(1.0), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    special,
    survival,
    full_state,
    leggett_garg,
    integrator
);
criterion_main!(benches);
