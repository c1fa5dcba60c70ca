//! Command execution.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use qrecon_core::analytic::{lower_bound_flattened, lower_bound_theta_with, BoundForm, DEFAULT_SERIES_TOL};
use qrecon_core::{
    lower_bound_theta, optimal_rate, optimal_threshold, simulate, theta_threshold, theta_uniform, theta_zero_wait,
    DistortionReport, Error, InterpolationMode, Policy, SimConfig,
};

use crate::error::{CliError, CliResult};
use crate::output::{write_artifacts, CsvRow, Estimate, Summary};
use crate::spec::{ExperimentSpec, GridPoint, PolicyKind};
use crate::validate;

/// Terms allowed in the lower-bound series.
pub const LOWER_BOUND_TERMS: usize = 2000;

/// Files written by a command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

pub fn execute(spec: &ExperimentSpec) -> CliResult<Outcome> {
    match spec.command {
        "analytic" => analytic(spec),
        "simulate" => simulate_grid(spec, true),
        "sweep" => simulate_grid(spec, false),
        "optimize" => optimize(spec),
        "lowerbound" => lowerbound(spec),
        "validate" => validate::run(spec),
        other => Err(CliError::usage(format!("unknown command '{other}'"))),
    }
}

pub(crate) fn pool(workers: Option<usize>) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}

/// Closed-form values at a grid point; `None` where the queue is unstable.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Overlay {
    pub theta: Option<f64>,
    pub lower_bound: Option<f64>,
}

fn stable_or_none<T>(r: qrecon_core::Result<T>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unstable(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn overlay(point: &GridPoint) -> CliResult<Overlay> {
    let (lambda, mu) = (point.lambda, point.mu);
    Ok(match point.policy {
        Policy::Uniform { rate } => Overlay {
            theta: stable_or_none(theta_uniform(rate, lambda, mu))?.map(|b| b.total()),
            lower_bound: stable_or_none(lower_bound_theta(rate, lambda, mu, LOWER_BOUND_TERMS, DEFAULT_SERIES_TOL))?
                .map(|b| b.value),
        },
        Policy::Threshold { beta } => {
            Overlay { theta: stable_or_none(theta_threshold(beta, lambda, mu))?.map(|b| b.total()), lower_bound: None }
        }
        Policy::ZeroWait => Overlay { theta: Some(theta_zero_wait(lambda, mu)?.total()), lower_bound: None },
    })
}

fn analytic_row(point: &GridPoint, overlay: Overlay) -> CsvRow {
    CsvRow {
        policy: point.label(),
        lambda: point.lambda,
        mu: point.mu,
        param: point.policy.parameter(),
        horizon: None,
        seed: None,
        theta_hat: None,
        abs_theta_hat: None,
        mean_delay: None,
        mean_aoi: None,
        samples: None,
        unstable: None,
        theta_analytic: overlay.theta,
        theta_lower_bound: overlay.lower_bound,
    }
}

pub(crate) fn sim_row(point: &GridPoint, report: &DistortionReport, overlay: Overlay) -> CsvRow {
    CsvRow {
        horizon: Some(report.horizon),
        seed: Some(report.seed),
        theta_hat: Some(report.theta_hat),
        abs_theta_hat: Some(report.abs_theta_hat),
        mean_delay: report.mean_delay,
        mean_aoi: report.mean_aoi,
        samples: Some(report.sample_count),
        unstable: Some(report.unstable),
        ..analytic_row(point, overlay)
    }
}

fn analytic(spec: &ExperimentSpec) -> CliResult<Outcome> {
    let points = spec.grid();
    let overlays = pool(spec.workers)?.install(|| points.par_iter().map(overlay).collect::<CliResult<Vec<_>>>())?;
    let rows: Vec<CsvRow> = points.iter().zip(&overlays).map(|(p, o)| analytic_row(p, *o)).collect();
    println!("{:<22} {:>7} {:>7} {:>8} {:>12} {:>12}", "policy", "lambda", "mu", "param", "theta", "lower_bound");
    for row in &rows {
        println!(
            "{:<22} {:>7} {:>7} {:>8} {:>12} {:>12}",
            row.policy,
            row.lambda,
            row.mu,
            fmt_opt(row.param),
            fmt_opt(row.theta_analytic),
            fmt_opt(row.theta_lower_bound)
        );
    }
    let summary = Summary::new(spec, rows.clone());
    let (csv, json) = write_artifacts(spec, &rows, &summary)?;
    Ok(Outcome { csv: Some(csv), json: Some(json) })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub policy: String,
    pub interpolation: InterpolationMode,
    pub lambda: f64,
    pub mu: f64,
    pub param: Option<f64>,
    pub config_hash: String,
    pub theta_hat: Option<Estimate>,
    pub abs_theta_hat: Option<Estimate>,
    pub mean_delay: Option<Estimate>,
    pub mean_aoi: Option<Estimate>,
    /// Any replication ended with a runaway backlog, or the closed form has no
    /// steady state.
    pub unstable: bool,
    pub theta_analytic: Option<f64>,
    pub theta_lower_bound: Option<f64>,
    /// `theta_hat` for plotting: the ceiling when unstable.
    pub theta_plot: Option<f64>,
}

/// Grid points, their analytic overlays and per-replication reports.
pub type GridRun = (Vec<GridPoint>, Vec<Overlay>, Vec<Vec<DistortionReport>>);

/// Runs every (grid point, replication) pair in grid order.
pub fn run_grid(spec: &ExperimentSpec) -> CliResult<GridRun> {
    let points = spec.grid();
    let pool = pool(spec.workers)?;
    let overlays = pool.install(|| points.par_iter().map(overlay).collect::<CliResult<Vec<_>>>())?;
    let tasks: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|i| (0..spec.reps).map(move |k| (i, spec.seed.wrapping_add(u64::from(k)))))
        .collect();
    let reports = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, seed)| {
                let p = &points[i];
                let cfg =
                    SimConfig::new(p.lambda, p.mu, p.policy, spec.horizon, seed).with_interpolation(p.interpolation);
                simulate(&cfg)
            })
            .collect::<qrecon_core::Result<Vec<_>>>()
    })?;
    let mut grouped: Vec<Vec<DistortionReport>> = vec![Vec::new(); points.len()];
    for ((i, _), report) in tasks.iter().zip(reports) {
        grouped[*i].push(report);
    }
    Ok((points, overlays, grouped))
}

fn summarise(spec: &ExperimentSpec, point: &GridPoint, overlay: Overlay, reports: &[DistortionReport]) -> PointSummary {
    let collect =
        |f: &dyn Fn(&DistortionReport) -> Option<f64>| Estimate::of(&reports.iter().filter_map(f).collect::<Vec<_>>());
    let theta_hat = collect(&|r| Some(r.theta_hat));
    let unstable = reports.iter().any(|r| r.unstable) || overlay.theta.is_none();
    let theta_plot = theta_hat.map(|e| if unstable { spec.ceiling } else { e.mean.min(spec.ceiling) });
    PointSummary {
        policy: point.label(),
        interpolation: point.interpolation,
        lambda: point.lambda,
        mu: point.mu,
        param: point.policy.parameter(),
        config_hash: point.hash(spec.horizon, spec.seed),
        theta_hat,
        abs_theta_hat: collect(&|r| Some(r.abs_theta_hat)),
        mean_delay: collect(&|r| r.mean_delay),
        mean_aoi: collect(&|r| r.mean_aoi),
        unstable,
        theta_analytic: overlay.theta,
        theta_lower_bound: overlay.lower_bound,
        theta_plot,
    }
}

fn simulate_grid(spec: &ExperimentSpec, verbose: bool) -> CliResult<Outcome> {
    let (points, overlays, grouped) = run_grid(spec)?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for ((point, overlay), reports) in points.iter().zip(&overlays).zip(&grouped) {
        rows.extend(reports.iter().map(|r| sim_row(point, r, *overlay)));
        let summary = summarise(spec, point, *overlay, reports);
        if verbose {
            for r in reports {
                println!("{}", serde_json::to_string(r)?);
            }
        } else {
            let theta = summary.theta_hat.map_or(f64::NAN, |e| e.mean);
            println!(
                "{:<22} lambda={:<6} mu={:<6} param={:<8} theta_hat={:<10.5} analytic={}{}",
                summary.policy,
                point.lambda,
                point.mu,
                fmt_opt(summary.param),
                theta,
                fmt_opt(summary.theta_analytic),
                if summary.unstable { "  [unstable]" } else { "" }
            );
        }
        summaries.push(summary);
    }
    let (csv, json) = write_artifacts(spec, &rows, &Summary::new(spec, summaries))?;
    eprintln!("wrote {} and {}", csv.display(), json.display());
    Ok(Outcome { csv: Some(csv), json: Some(json) })
}

#[derive(Debug, Clone, Serialize)]
struct OptimumSummary {
    lambda: f64,
    mu: f64,
    rate: Option<qrecon_core::RateOptimum>,
    threshold: Option<qrecon_core::ThresholdOptimum>,
    /// Why a requested optimum does not exist.
    errors: Vec<String>,
}

fn optimize(spec: &ExperimentSpec) -> CliResult<Outcome> {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &lambda in &spec.lambdas {
        for &mu in &spec.mus {
            let mut s = OptimumSummary { lambda, mu, rate: None, threshold: None, errors: Vec::new() };
            if spec.policies.contains(&PolicyKind::Uniform) {
                let opt = optimal_rate(lambda, mu, None, qrecon_core::optimize::DEFAULT_RATE_TOL)?;
                let point = GridPoint {
                    policy: Policy::Uniform { rate: opt.rate },
                    lambda,
                    mu,
                    interpolation: InterpolationMode::Off,
                };
                rows.push(analytic_row(&point, overlay(&point)?));
                println!(
                    "uniform   lambda={lambda:<6} mu={mu:<6} r*={:.5} theta*={:.6}{}",
                    opt.rate,
                    opt.theta,
                    if opt.multimodal { "  [multimodal grid]" } else { "" }
                );
                s.rate = Some(opt);
            }
            if spec.policies.contains(&PolicyKind::Threshold) {
                match optimal_threshold(lambda, mu, spec.beta_max) {
                    Ok(opt) => {
                        let point = GridPoint {
                            policy: Policy::Threshold { beta: opt.beta },
                            lambda,
                            mu,
                            interpolation: InterpolationMode::Off,
                        };
                        rows.push(analytic_row(&point, overlay(&point)?));
                        println!("threshold lambda={lambda:<6} mu={mu:<6} beta*={} theta*={:.6}", opt.beta, opt.theta);
                        s.threshold = Some(opt);
                    }
                    Err(e @ Error::Infeasible(_)) => {
                        println!("threshold lambda={lambda:<6} mu={mu:<6} {e}");
                        s.errors.push(e.to_string());
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            if spec.policies.contains(&PolicyKind::ZeroWait) {
                let point = GridPoint { policy: Policy::ZeroWait, lambda, mu, interpolation: InterpolationMode::Off };
                rows.push(analytic_row(&point, overlay(&point)?));
            }
            summaries.push(s);
        }
    }
    let (csv, json) = write_artifacts(spec, &rows, &Summary::new(spec, summaries))?;
    Ok(Outcome { csv: Some(csv), json: Some(json) })
}

#[derive(Debug, Clone, Serialize)]
struct BoundSummary {
    lambda: f64,
    mu: f64,
    rate: f64,
    theta: Option<f64>,
    /// Corrected form used throughout.
    lower_bound: Option<f64>,
    lower_bound_published: Option<f64>,
    lower_bound_flattened: Option<f64>,
    oracle: Option<Estimate>,
}

fn lowerbound(spec: &ExperimentSpec) -> CliResult<Outcome> {
    if !spec.policies.contains(&PolicyKind::Uniform) {
        return Err(CliError::usage("lowerbound applies to uniform sampling; pass --policy uniform"));
    }
    let mut oracle_spec = spec.clone();
    oracle_spec.policies = vec![PolicyKind::Uniform];
    oracle_spec.interpolation = vec![InterpolationMode::Oracle];
    let (points, overlays, grouped) = run_grid(&oracle_spec)?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for ((point, overlay), reports) in points.iter().zip(&overlays).zip(&grouped) {
        let Policy::Uniform { rate } = point.policy else { unreachable!("uniform grid") };
        rows.extend(reports.iter().map(|r| sim_row(point, r, *overlay)));
        let published = stable_or_none(lower_bound_theta_with(
            BoundForm::Published,
            rate,
            point.lambda,
            point.mu,
            LOWER_BOUND_TERMS,
            DEFAULT_SERIES_TOL,
        ))?
        .map(|b| b.value);
        let flattened = stable_or_none(lower_bound_flattened(rate, point.lambda, point.mu, LOWER_BOUND_TERMS))?;
        let oracle = Estimate::of(&reports.iter().map(|r| r.abs_theta_hat).collect::<Vec<_>>());
        println!(
            "lambda={:<6} mu={:<6} r={:<6} theta={} bound={} oracle={}",
            point.lambda,
            point.mu,
            rate,
            fmt_opt(overlay.theta),
            fmt_opt(overlay.lower_bound),
            fmt_opt(oracle.map(|e| e.mean))
        );
        summaries.push(BoundSummary {
            lambda: point.lambda,
            mu: point.mu,
            rate,
            theta: overlay.theta,
            lower_bound: overlay.lower_bound,
            lower_bound_published: published,
            lower_bound_flattened: flattened,
            oracle,
        });
    }
    let (csv, json) = write_artifacts(spec, &rows, &Summary::new(spec, summaries))?;
    Ok(Outcome { csv: Some(csv), json: Some(json) })
}
