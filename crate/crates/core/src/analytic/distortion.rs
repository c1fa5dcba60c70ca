use serde::{Deserialize, Serialize};

use super::roots::{solve_sigma, solve_z0};
use crate::error::{require_positive, Result};

/// Average distortion split by cause.
///
/// `sampling` comes from events omitted between samples, `wait` from queueing
/// delay and `service` from transmission time. Their sum is Θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionBreakdown {
    pub sampling: f64,
    pub wait: f64,
    pub service: f64,
}

impl DistortionBreakdown {
    pub fn total(&self) -> f64 {
        self.sampling + self.wait + self.service
    }
}

/// Mean areas of the sub-polygons making up one distortion polygon.
///
/// Under zero-wait sampling there is no queueing sub-polygon: `b` is the
/// service (transmission) area and `c` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonMeans {
    pub a: f64,
    pub b: f64,
    pub c: Option<f64>,
}

impl PolygonMeans {
    pub fn total(&self) -> f64 {
        self.a + self.b + self.c.unwrap_or(0.0)
    }
}

/// Θ(r) = λ(1/(2r) + σ/(μ(1-σ)) + 1/μ)
pub fn theta_uniform(rate: f64, lambda: f64, mu: f64) -> Result<DistortionBreakdown> {
    require_positive("arrival rate", lambda)?;
    let sigma = solve_sigma(rate, mu)?;
    Ok(uniform_from_sigma(rate, lambda, mu, sigma))
}

pub(crate) fn uniform_from_sigma(rate: f64, lambda: f64, mu: f64, sigma: f64) -> DistortionBreakdown {
    DistortionBreakdown {
        sampling: lambda / (2.0 * rate),
        wait: lambda * sigma / (mu * (1.0 - sigma)),
        service: lambda / mu,
    }
}

/// Θ(β) = λ((β-1)/(2λ) + 1/(μ(z0^β - 1)) + 1/μ)
pub fn theta_threshold(beta: u32, lambda: f64, mu: f64) -> Result<DistortionBreakdown> {
    let z0 = solve_z0(beta, lambda, mu)?;
    Ok(threshold_from_z0(beta, lambda, mu, z0))
}

pub(crate) fn threshold_from_z0(beta: u32, lambda: f64, mu: f64, z0: f64) -> DistortionBreakdown {
    let b = f64::from(beta);
    DistortionBreakdown {
        sampling: (b - 1.0) / 2.0,
        wait: lambda / (mu * (z0.powi(beta as i32) - 1.0)),
        service: lambda / mu,
    }
}

/// Θ_zw = 2λ/μ, half from sampling and half from service.
pub fn theta_zero_wait(lambda: f64, mu: f64) -> Result<DistortionBreakdown> {
    require_positive("arrival rate", lambda)?;
    require_positive("service rate", mu)?;
    Ok(DistortionBreakdown { sampling: lambda / mu, wait: 0.0, service: lambda / mu })
}

/// `(E{S_A}, E{S_B}, E{S_C}) = (λ/(2r²), (λ/r)σ/(μ(1-σ)), (λ/r)/μ)`
pub fn mean_polygon_areas_uniform(rate: f64, lambda: f64, mu: f64) -> Result<PolygonMeans> {
    let theta = theta_uniform(rate, lambda, mu)?;
    // Θ = r E{S_Δ}
    Ok(PolygonMeans { a: theta.sampling / rate, b: theta.wait / rate, c: Some(theta.service / rate) })
}

/// `(β(β-1)/(2λ), β/(μ(z0^β-1)), β/μ)`
pub fn mean_polygon_areas_threshold(beta: u32, lambda: f64, mu: f64) -> Result<PolygonMeans> {
    let theta = theta_threshold(beta, lambda, mu)?;
    // Θ = (λ/β) E{S_Δ}
    let per = f64::from(beta) / lambda;
    Ok(PolygonMeans { a: theta.sampling * per, b: theta.wait * per, c: Some(theta.service * per) })
}

/// `E{S_A} = E{S_B} = λ/μ²`
pub fn mean_polygon_areas_zero_wait(lambda: f64, mu: f64) -> Result<PolygonMeans> {
    require_positive("arrival rate", lambda)?;
    require_positive("service rate", mu)?;
    let area = lambda / (mu * mu);
    Ok(PolygonMeans { a: area, b: area, c: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn uniform_reference_point() {
        // σ(0.5, 1) = 0.2031878699799800 from the bisection oracle
        let s = 0.203_187_869_979_98_f64;
        let expected = 0.9 * (1.0 + s / (1.0 - s) + 1.0);
        let theta = theta_uniform(0.5, 0.9, 1.0).unwrap();
        assert!((theta.total() - expected).abs() < 1e-10);
        assert!((theta.total() - 2.029_5).abs() < 1e-3);
        assert_eq!(theta.sampling, 0.9);
        assert_eq!(theta.service, 0.9);
    }

    #[test]
    fn uniform_diverges_at_low_rate() {
        let a = theta_uniform(1e-3, 0.9, 1.0).unwrap();
        let b = theta_uniform(1e-4, 0.9, 1.0).unwrap();
        assert!((a.total() / (0.9 / 2e-3) - 1.0).abs() < 1e-2);
        assert!((b.total() / a.total() - 10.0).abs() < 0.1);
    }

    #[test]
    fn uniform_unstable() {
        assert!(matches!(theta_uniform(1.0, 0.9, 1.0), Err(Error::Unstable(_))));
    }

    #[test]
    fn threshold_unit_beta_reference() {
        let theta = theta_threshold(1, 0.5, 1.0).unwrap();
        assert!((theta.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_unit_beta_is_mm1() {
        for lambda in [0.1, 0.3, 0.5, 0.7, 0.95] {
            for mu in [1.0, 2.0, 3.5] {
                if lambda >= mu {
                    continue;
                }
                let theta = theta_threshold(1, lambda, mu).unwrap().total();
                let mm1 = lambda * (lambda / (mu * (mu - lambda)) + 1.0 / mu);
                assert!((theta - mm1).abs() < 1e-10, "lambda={lambda} mu={mu}");
            }
        }
    }

    #[test]
    fn zero_wait_values() {
        assert_eq!(theta_zero_wait(0.9, 1.0).unwrap().total(), 1.8);
        assert_eq!(theta_zero_wait(2.0, 4.0).unwrap().total(), 1.0);
        let one = theta_zero_wait(0.7, 1.3).unwrap().total();
        let two = theta_zero_wait(1.4, 1.3).unwrap().total();
        assert!((two - 2.0 * one).abs() < 1e-15);
        assert!(theta_zero_wait(0.0, 1.0).is_err());
        assert!(theta_zero_wait(1.0, -1.0).is_err());
    }

    #[test]
    fn uniform_polygon_means() {
        let m = mean_polygon_areas_uniform(0.5, 0.9, 1.0).unwrap();
        assert!((m.a - 1.8).abs() < 1e-15);
        let theta = theta_uniform(0.5, 0.9, 1.0).unwrap().total();
        assert!((0.5 * m.total() - theta).abs() < 1e-12);

        let fast = mean_polygon_areas_uniform(1.0, 2.0, 1e9).unwrap();
        assert!((fast.a - 1.0).abs() < 1e-15);
        assert!(fast.b < 1e-12);
        assert!((fast.c.unwrap() - 2.0 / 1e9).abs() < 1e-20);
    }

    #[test]
    fn threshold_polygon_means() {
        let (beta, lambda, mu) = (3, 1.5, 1.0);
        let m = mean_polygon_areas_threshold(beta, lambda, mu).unwrap();
        assert!((m.a - 3.0 * 2.0 / (2.0 * 1.5)).abs() < 1e-12);
        assert!((m.c.unwrap() - 3.0).abs() < 1e-12);
        let theta = theta_threshold(beta, lambda, mu).unwrap().total();
        assert!((lambda / 3.0 * m.total() - theta).abs() < 1e-12);
    }

    #[test]
    fn zero_wait_polygon_means() {
        let m = mean_polygon_areas_zero_wait(0.9, 1.0).unwrap();
        assert_eq!((m.a, m.b, m.c), (0.9, 0.9, None));
        // Θ_zw = μ E{S_Δ}
        assert!((m.total() - theta_zero_wait(0.9, 1.0).unwrap().total()).abs() < 1e-15);
    }
}
