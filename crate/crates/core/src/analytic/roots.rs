use crate::error::{require_positive, Error, Result};

/// `σ - exp(-(μ/r)(1-σ))`
pub fn sigma_residual(sigma: f64, rate: f64, mu: f64) -> f64 {
    sigma - (-(mu / rate) * (1.0 - sigma)).exp()
}

/// Root σ ∈ (0, 1) of `σ = exp(-(μ/r)(1-σ))`, the D/M/1 parameter for
/// deterministic interarrival `1/r` and exponential service rate `μ`.
///
/// `g(σ) = σ - exp(-a(1-σ))` with `a = μ/r > 1` is concave, negative at 0 and
/// maximal at `σ_m = 1 - ln(a)/a`, so `[0, σ_m]` brackets the only root below
/// the trivial one at 1. Newton from 0 converges monotonically from the left;
/// bisection takes over if a step ever leaves the bracket.
pub fn solve_sigma(rate: f64, mu: f64) -> Result<f64> {
    require_positive("sampling rate", rate)?;
    require_positive("service rate", mu)?;
    if rate >= mu {
        return Err(Error::Unstable(format!("D/M/1 needs sampling rate < service rate, got r={rate} >= mu={mu}")));
    }
    let a = mu / rate;
    let g = |s: f64| s - (-a * (1.0 - s)).exp();
    let (mut lo, mut hi) = (0.0_f64, 1.0 - a.ln() / a);
    let mut s = 0.0_f64;
    for _ in 0..200 {
        let e = (-a * (1.0 - s)).exp();
        let gs = s - e;
        if gs == 0.0 {
            return Ok(s);
        }
        if gs < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let slope = 1.0 - a * e;
        let newton = if slope > 0.0 { s - gs / slope } else { f64::NAN };
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - s).abs() <= 4.0 * f64::EPSILON * next.max(f64::MIN_POSITIVE) || hi - lo <= f64::EPSILON * hi {
            s = next;
            break;
        }
        s = next;
    }
    let residual = g(s).abs();
    if !(s > 0.0 && s < 1.0) || residual > 1e-12 {
        return Err(Error::Numerical(format!(
            "sigma iteration ended at {s} with residual {residual:e} (r={rate}, mu={mu})"
        )));
    }
    Ok(s)
}

/// `(λ/μ) z^{β+1} - (1 + λ/μ) z^β + 1`
pub fn z0_residual(z: f64, beta: u32, lambda: f64, mu: f64) -> f64 {
    let rho = lambda / mu;
    let zb = z.powi(beta as i32);
    rho * zb * z - (1.0 + rho) * zb + 1.0
}

/// `q(z) = ρ z^β - Σ_{j<β} z^j`, the characteristic polynomial divided by the
/// trivial factor `(z - 1)`.
fn deflated(z: f64, beta: u32, rho: f64) -> f64 {
    let mut geometric = 0.0;
    let mut power = 1.0;
    for _ in 0..beta {
        geometric += power;
        power *= z;
    }
    rho * power - geometric
}

/// The real root `z0 > 1` of the E_β/M/1 characteristic polynomial.
///
/// `z = 1` is always a root; dividing it out leaves `q` with `q(1) = ρ - β`,
/// negative exactly when the queue is stable, and `q → +∞`. The unique sign
/// change on `(1, ∞)` is located by doubling an upper end from 2 and then
/// bisecting to float resolution.
pub fn solve_z0(beta: u32, lambda: f64, mu: f64) -> Result<f64> {
    if beta == 0 {
        return Err(Error::param("threshold beta must be >= 1"));
    }
    require_positive("arrival rate", lambda)?;
    require_positive("service rate", mu)?;
    let rho = lambda / mu;
    if rho >= f64::from(beta) {
        return Err(Error::Unstable(format!(
            "E_beta/M/1 needs lambda < beta*mu, got lambda={lambda}, beta={beta}, mu={mu}"
        )));
    }
    let q = |z: f64| deflated(z, beta, rho);
    let mut lo = 1.0_f64;
    let mut hi = 2.0_f64;
    while q(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numerical(format!("no sign change for z0 (beta={beta}, rho={rho})")));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
