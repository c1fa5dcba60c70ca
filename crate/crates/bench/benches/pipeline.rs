use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qrecon_bench::{recorded_run, uniform_config, LAMBDA, MU};
use qrecon_core::analytic::DEFAULT_SERIES_TOL;
use qrecon_core::interpolation::{oracle_reconstruction, plain_reconstruction};
use qrecon_core::{
    erlang_chain, integrate_difference, lower_bound_theta, optimal_rate, optimal_threshold, simulate, solve_sigma,
    solve_z0, InterpolationMode, Policy, SimConfig,
};

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    for mode in [InterpolationMode::Off, InterpolationMode::UniformJ, InterpolationMode::Oracle] {
        let cfg = uniform_config(1e4, mode);
        group.bench_with_input(BenchmarkId::new("uniform", mode), &cfg, |b, cfg| {
            b.iter(|| simulate(black_box(cfg)).unwrap())
        });
    }
    for (name, policy) in [("threshold", Policy::Threshold { beta: 2 }), ("zero_wait", Policy::ZeroWait)] {
        let cfg = SimConfig::new(LAMBDA, MU, policy, 1e4, 1);
        group.bench_function(name, |b| b.iter(|| simulate(black_box(&cfg)).unwrap()));
    }
    group.finish();
}

fn reconstruction(c: &mut Criterion) {
    let run = recorded_run(1e4);
    let truth = run.path.to_step_trace();
    let plain = plain_reconstruction(&run.packets, 1e4).unwrap();
    c.bench_function("integrate_difference", |b| {
        b.iter(|| integrate_difference(black_box(&truth), black_box(&plain), 1e4).unwrap())
    });
    c.bench_function("oracle_reconstruction", |b| {
        b.iter(|| oracle_reconstruction(black_box(&run.path), black_box(&run.packets), 1e4).unwrap())
    });
}

fn analytic(c: &mut Criterion) {
    c.bench_function("solve_sigma", |b| b.iter(|| solve_sigma(black_box(0.5), MU).unwrap()));
    c.bench_function("solve_z0 beta=5", |b| b.iter(|| solve_z0(5, black_box(3.0), MU).unwrap()));
    c.bench_function("erlang_chain beta=5", |b| b.iter(|| erlang_chain(5, black_box(3.0), MU).unwrap()));
    c.bench_function("lower_bound_theta", |b| {
        b.iter(|| lower_bound_theta(black_box(0.5), LAMBDA, MU, 2000, DEFAULT_SERIES_TOL).unwrap())
    });
    c.bench_function("optimal_rate", |b| b.iter(|| optimal_rate(black_box(LAMBDA), MU, None, 1e-4).unwrap()));
    c.bench_function("optimal_threshold", |b| b.iter(|| optimal_threshold(black_box(3.0), MU, 64).unwrap()));
}

criterion_group!(benches, simulation, reconstruction, analytic);
criterion_main!(benches);
