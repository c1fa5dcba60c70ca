//! Lower bound on the average distortion achievable by any monitor-side
//! interpolation under uniform sampling.
//!
//! The bound is attained by an oracle that, between deliveries `t'_{i-1}` and
//! `t'_i`, follows `min(N(t), N(t_i))`. Conditioned on the previous sample's
//! system time `x` and on the `n` events of the sampling interval `d = 1/r`:
//!
//! - `x ≥ d`: every event is counted at `t'_{i-1}`, mean area `n(x - d/2)`.
//! - `x < d`: only events in `(t_{i-1}, t_{i-1} + x]` are late, each by a
//!   uniform amount on `(0, x)`. Their count is Binomial(n, x/d), so the mean
//!   area is `(n x / d) · x / 2`.
//!
//! Averaging over `n ~ Poisson(λd)` and over the D/M/1 system time, which is
//! exponential with rate `μ(1-σ)`, gives `Θ̆ = r(Ŝ₁ + Ŝ₂)`.
//!
//! [`BoundForm::Published`] evaluates the same two series with the delay
//! density scaled by σ and with the inner count averaged as a Poisson(λx)
//! variable truncated at `m ≤ n`. Both choices bias the bound low; that form
//! is kept for comparison only.

use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, Poisson};

use super::quadrature::adaptive_simpson;
use super::roots::solve_sigma;
use crate::error::{require_positive, Error, Result};

/// Default relative truncation tolerance for the Poisson series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-9;

const POLYGON_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    Exact,
    Published,
}

/// System time (wait plus service) of a D/M/1 queue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayDistribution {
    pub sigma: f64,
    pub mu: f64,
}

impl DelayDistribution {
    pub fn new(rate: f64, mu: f64) -> Result<Self> {
        Ok(Self { sigma: solve_sigma(rate, mu)?, mu })
    }

    /// Exponential decay rate `μ(1-σ)`.
    pub fn decay(&self) -> f64 {
        self.mu * (1.0 - self.sigma)
    }

    /// Probability density of the system time, `μ(1-σ)e^{-μ(1-σ)x}`.
    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            let c = self.decay();
            c * (-c * x).exp()
        }
    }

    /// `p(x) = σμ(1-σ)e^{-μ(1-σ)x}` as written in the published bound. Its
    /// total mass is σ, not 1.
    pub fn published_density(&self, x: f64) -> f64 {
        self.sigma * self.density(x)
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.decay()
    }

    /// `∫_d^∞ (x - d/2) density(x) dx = e^{-cd}(d/2 + 1/c)`
    pub fn late_excess(&self, d: f64) -> f64 {
        let c = self.decay();
        (-c * d).exp() * (0.5 * d + 1.0 / c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    /// Θ̆ = r(Ŝ₁ + Ŝ₂)
    pub value: f64,
    /// Ŝ₁: mean polygon area when the previous sample arrives after `t_i`.
    pub late: f64,
    /// Ŝ₂: mean polygon area when it arrives before `t_i`.
    pub early: f64,
    /// Series terms summed.
    pub terms: usize,
    /// `P(N(d) > terms)` at the stopping point.
    pub tail_weight: f64,
    /// Whether the tail criterion was met before `n_max`.
    pub converged: bool,
    pub form: BoundForm,
}

/// Θ̆ for uniform sampling at rate `r`.
///
/// The series over `n = N(d)` stops once `P(N(d) > n) < tol · partial sum`,
/// or at `n_max` terms (reported through [`LowerBound::converged`]).
pub fn lower_bound_theta(rate: f64, lambda: f64, mu: f64, n_max: usize, tol: f64) -> Result<LowerBound> {
    lower_bound_theta_with(BoundForm::Exact, rate, lambda, mu, n_max, tol)
}

pub fn lower_bound_theta_with(
    form: BoundForm,
    rate: f64,
    lambda: f64,
    mu: f64,
    n_max: usize,
    tol: f64,
) -> Result<LowerBound> {
    require_positive("arrival rate", lambda)?;
    if n_max == 0 {
        return Err(Error::param("n_max must be >= 1"));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::param(format!("series tolerance must be >= 0, got {tol}")));
    }
    let delay = DelayDistribution::new(rate, mu)?;
    let d = 1.0 / rate;
    let mean_count = lambda * d;
    let counts = Poisson::new(mean_count).map_err(|e| Error::Numerical(format!("Poisson({mean_count}): {e}")))?;

    let (late_excess, early_kernel) = match form {
        BoundForm::Exact => {
            let k = adaptive_simpson(|x| 0.5 * x * x * delay.density(x), 0.0, d, POLYGON_QUAD_TOL)?;
            (delay.late_excess(d), k)
        }
        BoundForm::Published => (delay.sigma * delay.late_excess(d), 0.0),
    };

    let mut late = 0.0;
    let mut early = 0.0;
    // Published form: running Σ_{m ≤ n} ∫ (x/2) p(x) m P(N(x) = m) dx
    let mut inner = 0.0;
    let mut ln_factorial = 0.0;
    let mut prev_tail = f64::INFINITY;
    let mut terms = 0;
    let mut tail = 1.0;
    let mut converged = false;

    for n in 1..=n_max {
        let nf = n as f64;
        ln_factorial += nf.ln();
        let pmf = (nf * mean_count.ln() - mean_count - ln_factorial).exp();
        late += nf * pmf * late_excess;
        match form {
            BoundForm::Exact => early += pmf * nf / d * early_kernel,
            BoundForm::Published => {
                let lf = ln_factorial;
                let g = adaptive_simpson(
                    |x| {
                        if x <= 0.0 {
                            return 0.0;
                        }
                        let lx = lambda * x;
                        let count_pmf = (nf * lx.ln() - lx - lf).exp();
                        0.5 * x * delay.published_density(x) * nf * count_pmf
                    },
                    0.0,
                    d,
                    POLYGON_QUAD_TOL,
                )?;
                inner += g;
                early += pmf * inner;
            }
        }
        terms = n;
        tail = counts.sf(n as u64);
        if !(late.is_finite() && early.is_finite() && tail.is_finite()) {
            return Err(Error::Numerical(format!("lower-bound series diverged at n={n}")));
        }
        if tail > prev_tail + 1e-15 {
            return Err(Error::Numerical(format!("Poisson tail weight increased at n={n}")));
        }
        prev_tail = tail;
        let partial = late + early;
        if partial > 0.0 && tail < tol * partial {
            converged = true;
            break;
        }
    }

    Ok(LowerBound { value: rate * (late + early), late, early, terms, tail_weight: tail, converged, form })
}

/// The bound in its flattened single-series form, evaluated verbatim:
/// σ-scaled delay density and the inner count series summed to infinity,
/// `Σ_{m≥1} (λx)^m/(m-1)! = λx e^{λx}`.
///
/// Because the inner series is not cut at `m ≤ n`, this is never smaller
/// than [`BoundForm::Published`].
pub fn lower_bound_flattened(rate: f64, lambda: f64, mu: f64, n_max: usize) -> Result<f64> {
    require_positive("arrival rate", lambda)?;
    if n_max == 0 {
        return Err(Error::param("n_max must be >= 1"));
    }
    let delay = DelayDistribution::new(rate, mu)?;
    let d = 1.0 / rate;
    let c = delay.decay();
    let sigma = delay.sigma;
    // ∫_d^∞ (x - d/2) e^{-cx} dx
    let tail_integral = (-c * d).exp() * (0.5 * d + 1.0 / c) / c;
    // ½ ∫_0^d x e^{-(λ+c)x} · λx e^{λx} dx
    let head_integral = adaptive_simpson(|x| 0.5 * lambda * x * x * (-c * x).exp(), 0.0, d, POLYGON_QUAD_TOL)?;
    let mean_count = lambda * d;
    let mut sum = 0.0;
    let mut ln_factorial = 0.0;
    for n in 1..=n_max {
        let nf = n as f64;
        ln_factorial += nf.ln();
        let weight = (nf * mean_count.ln() - ln_factorial).exp();
        sum += weight * (nf * tail_integral + head_integral);
    }
    let value = rate * sigma * c * (-mean_count).exp() * sum;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical("flattened lower-bound series is not finite".into()))
    }
}
