//! Simulation-versus-theory reconciliation suite behind `qrecon validate`.
//!
//! Grids, horizons and tolerances are fixed here; the command line only
//! chooses the worker count and output directory.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use qrecon_core::analytic::{erlang_chain, sigma_residual, solve_sigma, solve_z0, z0_residual, DEFAULT_SERIES_TOL};
use qrecon_core::sim::decompose_polygons;
use qrecon_core::{
    lower_bound_theta, optimal_rate, optimal_threshold, simulate, simulate_recorded, theta_threshold, theta_uniform,
    InterpolationMode, Policy, SimConfig,
};

use crate::error::{CliError, CliResult};
use crate::output::{artifact_path, csv_bytes, write_file, Estimate};
use crate::run::{pool, run_grid, Outcome};
use crate::spec::{ExperimentSpec, PolicyKind};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = fn() -> CliResult<(bool, String)>;

const CHECKS: [(u32, &str, CheckFn); 11] = [
    (1, "uniform simulation matches closed form", uniform_grid),
    (2, "unit threshold reduces to M/M/1", mm1_reduction),
    (3, "zero-wait distortion is 2 lambda / mu", zero_wait),
    (4, "root residuals", root_residuals),
    (5, "optimal sampling rate", optimal_sampling_rate),
    (6, "optimal thresholds", optimal_thresholds),
    (7, "Erlang chain against truncated balance equations", erlang_oracle),
    (8, "interpolation lower bound", lower_bound),
    (9, "interpolation lowers distortion", interpolation_benefit),
    (10, "sub-polygon reconciliation", reconciliation),
    (11, "deterministic CSV", determinism),
];

pub fn run(spec: &ExperimentSpec) -> CliResult<Outcome> {
    let checks = pool(spec.workers)?.install(|| {
        CHECKS
            .iter()
            .map(|&(id, name, check)| {
                let (passed, detail) = check()?;
                println!("[{}] {id:>2} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
                Ok(Check { id, name, passed, detail })
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let json = artifact_path(spec, "json");
    write_file(&json, &serde_json::to_vec_pretty(&crate::output::Summary::new(spec, checks.clone()))?)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Validation(failed));
    }
    Ok(Outcome { csv: None, json: Some(json) })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn mean_theta(
    policy: Policy,
    lambda: f64,
    horizon: f64,
    seeds: std::ops::Range<u64>,
    mode: InterpolationMode,
) -> CliResult<Vec<f64>> {
    let seeds: Vec<u64> = seeds.collect();
    Ok(seeds
        .par_iter()
        .map(|&s| {
            simulate(&SimConfig::new(lambda, 1.0, policy, horizon, s).with_interpolation(mode)).map(|r| r.abs_theta_hat)
        })
        .collect::<qrecon_core::Result<Vec<_>>>()?)
}

fn uniform_grid() -> CliResult<(bool, String)> {
    let mut worst: f64 = 0.0;
    for k in 1..=9 {
        let r = 0.1 * k as f64;
        let sims = mean_theta(Policy::Uniform { rate: r }, 0.9, 1e5, 0..5, InterpolationMode::Off)?;
        let mean = sims.iter().sum::<f64>() / 5.0;
        worst = worst.max(rel(mean, theta_uniform(r, 0.9, 1.0)?.total()));
    }
    Ok((worst < 0.03, format!("max relative error {worst:.4} (< 0.03)")))
}

fn mm1_reduction() -> CliResult<(bool, String)> {
    let mut worst: f64 = 0.0;
    for mu in [0.5, 1.0, 2.0, 3.0, 5.0] {
        for load in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let lambda = load * mu;
            let expected = lambda * (lambda / (mu * (mu - lambda)) + 1.0 / mu);
            worst = worst.max((theta_threshold(1, lambda, mu)?.total() - expected).abs());
        }
    }
    Ok((worst < 1e-10, format!("max abs error {worst:.2e} (< 1e-10)")))
}

fn zero_wait() -> CliResult<(bool, String)> {
    let theta = simulate(&SimConfig::new(0.9, 1.0, Policy::ZeroWait, 1e6, 1))?.theta_hat;
    Ok(((1.764..=1.836).contains(&theta), format!("theta_hat {theta:.4} in [1.764, 1.836]")))
}

fn root_residuals() -> CliResult<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut inside = true;
    for mu in [0.2, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 20.0] {
        for k in 1..=10 {
            let rate = mu * (k as f64 - 0.5) / 10.0;
            let sigma = solve_sigma(rate, mu)?;
            inside &= sigma > 0.0 && sigma < 1.0;
            worst = worst.max(sigma_residual(sigma, rate, mu).abs());
        }
    }
    for beta in 1..=5u32 {
        for k in 1..=20 {
            let lambda = f64::from(beta) * (k as f64 - 0.5) / 20.0;
            let z0 = solve_z0(beta, lambda, 1.0)?;
            inside &= z0 > 1.0;
            worst = worst.max(z0_residual(z0, beta, lambda, 1.0).abs());
        }
    }
    Ok((inside && worst < 1e-10, format!("max residual {worst:.2e} (< 1e-10), roots in range: {inside}")))
}

fn optimal_sampling_rate() -> CliResult<(bool, String)> {
    let opt = optimal_rate(0.9, 1.0, None, qrecon_core::optimize::DEFAULT_RATE_TOL)?;
    let rates: Vec<f64> = (1..=19).map(|k| 0.05 * k as f64).collect();
    let sims = rates
        .par_iter()
        .map(|&r| simulate(&SimConfig::new(0.9, 1.0, Policy::Uniform { rate: r }, 1e5, 7)).map(|x| x.theta_hat))
        .collect::<qrecon_core::Result<Vec<_>>>()?;
    let (best, _) = sims.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    let sim_rate = rates[best];
    let passed = (0.47..=0.57).contains(&opt.rate) && (sim_rate - opt.rate).abs() <= 0.1 + 1e-9;
    Ok((passed, format!("r* = {:.4}, simulated argmin {sim_rate:.2}", opt.rate)))
}

fn optimal_thresholds() -> CliResult<(bool, String)> {
    let table = [(0.3, 1), (0.5, 1), (0.7, 2), (0.9, 2), (1.5, 3), (2.0, 4), (3.0, 6), (4.0, 8), (5.0, 10)];
    let mut found = Vec::new();
    for (lambda, _) in table {
        found.push(optimal_threshold(lambda, 1.0, 64)?.beta);
    }
    let passed = table.iter().zip(&found).all(|((_, b), f)| b == f);
    Ok((passed, format!("beta* = {found:?}")))
}

/// Mean number in system seen by a new sample, from the truncated joint
/// (samples in system, arrival phase) chain.
pub fn truncated_chain_mean_queue(beta: usize, lambda: f64, mu: f64, k_max: usize) -> Option<f64> {
    let n = (k_max + 1) * beta;
    let at = |k: usize, b: usize| k * beta + b;
    // transposed generator: row = destination, column = source
    let mut a = DMatrix::<f64>::zeros(n, n);
    for k in 0..=k_max {
        for b in 0..beta {
            let from = at(k, b);
            let mut out = 0.0;
            let target = if b + 1 < beta { Some(at(k, b + 1)) } else { (k < k_max).then(|| at(k + 1, 0)) };
            if let Some(to) = target {
                a[(to, from)] += lambda;
                out += lambda;
            }
            if k > 0 {
                a[(at(k - 1, b), from)] += mu;
                out += mu;
            }
            a[(from, from)] -= out;
        }
    }
    a.row_mut(n - 1).fill(1.0);
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = a.lu().solve(&rhs)?;
    let (mass, mean) = (0..=k_max).fold((0.0, 0.0), |(m, s), k| {
        let p = pi[at(k, beta - 1)];
        (m + p, s + k as f64 * p)
    });
    Some(mean / mass)
}

fn erlang_oracle() -> CliResult<(bool, String)> {
    let mut worst: f64 = 0.0;
    for beta in [1u32, 2, 3, 5] {
        for load in [0.3, 0.6, 0.9] {
            let lambda = load * f64::from(beta);
            let closed = erlang_chain(beta, lambda, 1.0)?.mean_queue;
            let brute = truncated_chain_mean_queue(beta as usize, lambda, 1.0, 200)
                .ok_or_else(|| qrecon_core::Error::Numerical("singular balance system".into()))?;
            worst = worst.max((closed - brute).abs());
        }
    }
    Ok((worst < 1e-6, format!("max |E{{q}} difference| {worst:.2e} (< 1e-6)")))
}

fn lower_bound() -> CliResult<(bool, String)> {
    let mut below = true;
    for k in 1..=9 {
        let r = 0.1 * k as f64;
        below &= lower_bound_theta(r, 0.9, 1.0, 2000, DEFAULT_SERIES_TOL)?.value <= theta_uniform(r, 0.9, 1.0)?.total();
    }
    let bound = lower_bound_theta(0.5, 0.9, 1.0, 2000, DEFAULT_SERIES_TOL)?.value;
    let cfg =
        SimConfig::new(0.9, 1.0, Policy::Uniform { rate: 0.5 }, 1e6, 1).with_interpolation(InterpolationMode::Oracle);
    let oracle = simulate(&cfg)?.abs_theta_hat;
    let err = rel(oracle, bound);
    Ok((
        below && err < 0.05,
        format!("bound <= theta: {below}; oracle {oracle:.4} vs bound {bound:.4} ({err:.4} < 0.05)"),
    ))
}

fn interpolation_benefit() -> CliResult<(bool, String)> {
    let mut passed = true;
    let mut detail = Vec::new();
    for rate in [0.05, 0.1, 0.2] {
        let policy = Policy::Uniform { rate };
        let est = |mode| -> CliResult<Estimate> {
            Ok(Estimate::of(&mean_theta(policy, 0.9, 1e5, 0..20, mode)?).expect("20 seeds"))
        };
        let off = est(InterpolationMode::Off)?;
        let single = est(InterpolationMode::SinglePoint)?;
        let uniform = est(InterpolationMode::UniformJ)?;
        let ci = |e: &Estimate| 1.96 * e.std_error.unwrap_or(0.0);
        let ok =
            off.mean > single.mean && single.mean > uniform.mean && off.mean - ci(&off) > uniform.mean + ci(&uniform);
        passed &= ok;
        detail.push(format!("r={rate}: {:.3} > {:.3} > {:.3}", off.mean, single.mean, uniform.mean));
    }
    Ok((passed, detail.join("; ")))
}

fn reconciliation() -> CliResult<(bool, String)> {
    let mut worst: f64 = 0.0;
    for policy in [Policy::Uniform { rate: 0.5 }, Policy::Threshold { beta: 2 }, Policy::ZeroWait] {
        let run = simulate_recorded(&SimConfig::new(0.9, 1.0, policy, 1e5, 3))?;
        let integral = run.report.theta_hat * run.report.horizon;
        let split = decompose_polygons(&run.path, &run.packets, policy, run.report.horizon)?;
        worst = worst.max(rel(split.total(), integral));
    }
    let report = simulate(&SimConfig::new(0.9, 1.0, Policy::Uniform { rate: 0.5 }, 1e6, 5))?;
    let mean_a = report.area.means().map_or(f64::NAN, |m| m.a);
    let err = rel(mean_a, 1.8);
    Ok((worst < 1e-6 && err < 0.03, format!("max partition error {worst:.2e} (< 1e-6); mean S_A {mean_a:.4} vs 1.8")))
}

fn determinism() -> CliResult<(bool, String)> {
    let mut spec = ExperimentSpec::defaults("sweep");
    spec.policies = vec![PolicyKind::Uniform, PolicyKind::Threshold, PolicyKind::ZeroWait];
    spec.rates = vec![0.3, 0.6];
    spec.betas = vec![1, 2];
    spec.horizon = 1e4;
    spec.reps = 2;
    let render = |spec: &ExperimentSpec| -> CliResult<Vec<u8>> {
        let (points, overlays, grouped) = run_grid(spec)?;
        let rows: Vec<_> = points
            .iter()
            .zip(&overlays)
            .zip(&grouped)
            .flat_map(|((p, o), reports)| reports.iter().map(move |r| crate::run::sim_row(p, r, *o)))
            .collect();
        csv_bytes(&rows)
    };
    let first = render(&spec)?;
    let second = render(&spec)?;
    Ok((first == second, format!("{} CSV bytes, identical: {}", first.len(), first == second)))
}
