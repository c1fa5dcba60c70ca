//! Long-horizon simulation checks against the closed forms.

use qrecon_core::analytic::{lower_bound_theta, mean_polygon_areas_uniform, DEFAULT_SERIES_TOL};
use qrecon_core::{simulate, theta_threshold, theta_uniform, InterpolationMode, Policy, SimConfig};

const LONG: f64 = 1e6;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn run(policy: Policy, lambda: f64, horizon: f64, seed: u64) -> qrecon_core::DistortionReport {
    simulate(&SimConfig::new(lambda, 1.0, policy, horizon, seed)).unwrap()
}

#[test]
fn uniform_distortion_and_sampling_polygon() {
    let report = run(Policy::Uniform { rate: 0.5 }, 0.9, LONG, 1);
    let theta = theta_uniform(0.5, 0.9, 1.0).unwrap().total();
    assert!(rel(report.theta_hat, theta) < 0.03, "{} vs {theta}", report.theta_hat);
    let means = report.area.means().unwrap();
    let expected = mean_polygon_areas_uniform(0.5, 0.9, 1.0).unwrap();
    assert!(rel(means.a, 1.8) < 0.03, "S_A {}", means.a);
    assert!(rel(means.b, expected.b) < 0.05, "S_B {} vs {}", means.b, expected.b);
    assert!(rel(means.c.unwrap(), expected.c.unwrap()) < 0.03);
}

#[test]
fn zero_wait_constant_and_sub_polygons() {
    let report = run(Policy::ZeroWait, 0.9, LONG, 2);
    assert!((1.764..=1.836).contains(&report.theta_hat), "{}", report.theta_hat);
    let means = report.area.means().unwrap();
    assert!(rel(means.a, 0.9) < 0.03, "S_A {}", means.a);
    assert!(rel(means.b, 0.9) < 0.03, "S_B {}", means.b);
    assert!(means.c.is_none());
    assert_eq!(report.mean_wait, Some(0.0));
}

#[test]
fn unit_threshold_is_mm1() {
    let report = run(Policy::Threshold { beta: 1 }, 0.5, LONG, 3);
    let wait = report.mean_wait.unwrap();
    assert!(rel(wait, 1.0) < 0.03, "mean wait {wait}");
    let theta = theta_threshold(1, 0.5, 1.0).unwrap().total();
    assert!(rel(report.theta_hat, theta) < 0.03);
}

#[test]
fn threshold_three_matches_closed_form() {
    let report = run(Policy::Threshold { beta: 3 }, 1.5, LONG, 4);
    let theta = theta_threshold(3, 1.5, 1.0).unwrap().total();
    assert!(rel(report.theta_hat, theta) < 0.03, "{} vs {theta}", report.theta_hat);
}

#[test]
fn age_of_information_falls_then_rises() {
    let ages: Vec<f64> =
        (1..=9).map(|k| run(Policy::Uniform { rate: 0.1 * k as f64 }, 0.9, 1e5, 5).mean_aoi.unwrap()).collect();
    let (best, _) = ages.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    assert!(best > 0 && best < ages.len() - 1, "{ages:?}");
    assert!(ages[0] > ages[best] && ages[8] > ages[best]);
}

#[test]
fn mean_delay_grows_with_rate() {
    let delay = |r: f64| {
        (0..3).map(|s| run(Policy::Uniform { rate: r }, 0.9, LONG, 10 + s).mean_delay.unwrap()).sum::<f64>() / 3.0
    };
    let delays: Vec<f64> = (1..=9).map(|k| delay(0.1 * k as f64)).collect();
    for w in delays.windows(2) {
        assert!(w[1] >= w[0], "{delays:?}");
    }
}

#[test]
fn oracle_attains_lower_bound() {
    let cfg =
        SimConfig::new(0.9, 1.0, Policy::Uniform { rate: 0.5 }, LONG, 6).with_interpolation(InterpolationMode::Oracle);
    let report = simulate(&cfg).unwrap();
    let bound = lower_bound_theta(0.5, 0.9, 1.0, 500, DEFAULT_SERIES_TOL).unwrap().value;
    assert!(rel(report.abs_theta_hat, bound) < 0.05, "{} vs {bound}", report.abs_theta_hat);
    assert_eq!(report.theta_hat, report.abs_theta_hat);
}

#[test]
fn interpolation_lowers_mean_distortion_at_low_rates() {
    for rate in [0.1, 0.3] {
        let mean = |mode| {
            (0..20)
                .map(|seed| {
                    let cfg = SimConfig::new(0.9, 1.0, Policy::Uniform { rate }, 2e4, seed).with_interpolation(mode);
                    simulate(&cfg).unwrap().abs_theta_hat
                })
                .sum::<f64>()
                / 20.0
        };
        let off = mean(InterpolationMode::Off);
        let single = mean(InterpolationMode::SinglePoint);
        let uniform = mean(InterpolationMode::UniformJ);
        let oracle = mean(InterpolationMode::Oracle);
        assert!(off > single && single > uniform && uniform > oracle, "r={rate}: {off} {single} {uniform} {oracle}");
    }
}
