//! Distortion-minimising sampling parameters.
//!
//! Θ(r) has no usable closed-form derivative because σ is only implicit in
//! r, so the rate search is derivative-free: a coarse grid picks a bracket
//! and golden-section search refines it.

use serde::{Deserialize, Serialize};

use crate::analytic::{solve_sigma, theta_threshold, theta_uniform};
use crate::error::{require_positive, Error, Result};

/// Default tolerance on the optimal rate.
pub const DEFAULT_RATE_TOL: f64 = 1e-4;
const GRID_POINTS: usize = 64;
/// Distance kept from the stability boundary `r = μ`.
const STABILITY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateOptimum {
    pub rate: f64,
    pub theta: f64,
    /// Search interval after trimming.
    pub bracket: (f64, f64),
    /// More than one local minimum was seen on the pre-scan grid; the result
    /// is the refinement around the lowest grid point.
    pub multimodal: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptimum {
    pub beta: u32,
    pub theta: f64,
    /// Smallest threshold with a stable queue.
    pub beta_min: u32,
}

/// Minimises Θ(r) over `bracket` (default `(μ/1000, μ)`), to `tol` in r.
///
/// An upper end at or beyond μ is trimmed to `μ - 1e-6`.
pub fn optimal_rate(lambda: f64, mu: f64, bracket: Option<(f64, f64)>, tol: f64) -> Result<RateOptimum> {
    require_positive("arrival rate", lambda)?;
    require_positive("service rate", mu)?;
    require_positive("rate tolerance", tol)?;
    let (lo, hi) = bracket.unwrap_or((mu * 1e-3, mu));
    let hi = hi.min(mu - STABILITY_MARGIN);
    if !(lo.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::param(format!("rate bracket ({lo}, {hi}) must satisfy 0 < lo < hi < mu")));
    }
    let mut evaluations = 0;
    let mut theta = |r: f64| -> Result<f64> {
        evaluations += 1;
        let v = theta_uniform(r, lambda, mu)?.total();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numerical(format!("distortion at r={r} is {v}")))
        }
    };

    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> =
        (0..GRID_POINTS).map(|k| if k == GRID_POINTS - 1 { hi } else { lo + k as f64 * step }).collect();
    let values = grid.iter().map(|&r| theta(r)).collect::<Result<Vec<_>>>()?;
    let best = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(k, _)| k).unwrap_or(0);
    let local_minima = (0..GRID_POINTS)
        .filter(|&k| {
            let left = k == 0 || values[k] < values[k - 1];
            let right = k == GRID_POINTS - 1 || values[k] < values[k + 1];
            left && right
        })
        .count();

    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(GRID_POINTS - 1)]);
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (theta(c)?, theta(d)?);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = theta(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = theta(d)?;
        }
    }
    let (mut rate, mut value) = if fc <= fd { (c, fc) } else { (d, fd) };
    if values[best] < value {
        rate = grid[best];
        value = values[best];
    }
    Ok(RateOptimum { rate, theta: value, bracket: (lo, hi), multimodal: local_minima > 1, evaluations })
}

/// Minimises Θ(β) over every stable integer threshold up to `beta_max`.
/// Ties go to the smaller threshold.
pub fn optimal_threshold(lambda: f64, mu: f64, beta_max: u32) -> Result<ThresholdOptimum> {
    require_positive("arrival rate", lambda)?;
    require_positive("service rate", mu)?;
    // λ < βμ; the float quotient may be off by one at the boundary
    let mut beta_min = ((lambda / mu).floor().max(0.0) as u32).max(1);
    while lambda >= f64::from(beta_min) * mu {
        beta_min += 1;
    }
    while beta_min > 1 && lambda < f64::from(beta_min - 1) * mu {
        beta_min -= 1;
    }
    if beta_min > beta_max {
        return Err(Error::Infeasible(format!(
            "no stable threshold <= {beta_max} for lambda={lambda}, mu={mu}; need beta >= {beta_min}"
        )));
    }
    let mut best: Option<(u32, f64)> = None;
    for beta in beta_min..=beta_max {
        let theta = theta_threshold(beta, lambda, mu)?.total();
        if !theta.is_finite() {
            return Err(Error::Numerical(format!("distortion at beta={beta} is {theta}")));
        }
        if best.is_none_or(|(_, t)| theta < t) {
            best = Some((beta, theta));
        }
    }
    let (beta, theta) = best.expect("non-empty range");
    Ok(ThresholdOptimum { beta, theta, beta_min })
}

/// Whether `rate` is a stable uniform sampling rate for service rate `mu`.
pub fn is_stable_rate(rate: f64, mu: f64) -> bool {
    solve_sigma(rate, mu).is_ok()
}
