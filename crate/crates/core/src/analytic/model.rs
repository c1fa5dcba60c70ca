use serde::{Deserialize, Serialize};

use super::distortion::{threshold_from_z0, uniform_from_sigma, DistortionBreakdown, PolygonMeans};
use super::roots::{solve_sigma, solve_z0};
use crate::error::{require_positive, Result};
use crate::policy::Policy;

/// Solved queue parameters for one (λ, μ, policy) triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticModel {
    pub lambda: f64,
    pub mu: f64,
    pub policy: Policy,
    /// D/M/1 root, uniform policy only.
    pub sigma: Option<f64>,
    /// E_β/M/1 root, threshold policy only.
    pub z0: Option<f64>,
}

impl AnalyticModel {
    pub fn solve(lambda: f64, mu: f64, policy: Policy) -> Result<Self> {
        require_positive("arrival rate", lambda)?;
        require_positive("service rate", mu)?;
        policy.validate()?;
        let (sigma, z0) = match policy {
            Policy::Uniform { rate } => (Some(solve_sigma(rate, mu)?), None),
            Policy::Threshold { beta } => (None, Some(solve_z0(beta, lambda, mu)?)),
            Policy::ZeroWait => (None, None),
        };
        Ok(Self { lambda, mu, policy, sigma, z0 })
    }

    pub fn distortion(&self) -> DistortionBreakdown {
        match (self.policy, self.sigma, self.z0) {
            (Policy::Uniform { rate }, Some(sigma), _) => uniform_from_sigma(rate, self.lambda, self.mu, sigma),
            (Policy::Threshold { beta }, _, Some(z0)) => threshold_from_z0(beta, self.lambda, self.mu, z0),
            _ => {
                let half = self.lambda / self.mu;
                DistortionBreakdown { sampling: half, wait: 0.0, service: half }
            }
        }
    }

    /// Long-run samples per unit time.
    pub fn sampling_rate(&self) -> f64 {
        match self.policy {
            Policy::Uniform { rate } => rate,
            Policy::Threshold { beta } => self.lambda / f64::from(beta),
            Policy::ZeroWait => self.mu,
        }
    }

    /// Mean sub-polygon areas; Θ equals the sampling rate times their sum.
    pub fn polygon_means(&self) -> PolygonMeans {
        let d = self.distortion();
        let per = 1.0 / self.sampling_rate();
        match self.policy {
            Policy::ZeroWait => PolygonMeans { a: d.sampling * per, b: d.service * per, c: None },
            _ => PolygonMeans { a: d.sampling * per, b: d.wait * per, c: Some(d.service * per) },
        }
    }

    /// Mean queueing wait `E{w}`.
    pub fn mean_wait(&self) -> f64 {
        match (self.sigma, self.z0, self.policy) {
            (Some(s), _, _) => s / (self.mu * (1.0 - s)),
            (_, Some(z), Policy::Threshold { beta }) => 1.0 / (self.mu * (z.powi(beta as i32) - 1.0)),
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{mean_polygon_areas_threshold, mean_polygon_areas_uniform, theta_threshold, theta_uniform};

    #[test]
    fn model_matches_free_functions() {
        let m = AnalyticModel::solve(0.9, 1.0, Policy::Uniform { rate: 0.4 }).unwrap();
        assert_eq!(m.distortion(), theta_uniform(0.4, 0.9, 1.0).unwrap());
        let pm = m.polygon_means();
        let free = mean_polygon_areas_uniform(0.4, 0.9, 1.0).unwrap();
        assert!((pm.a - free.a).abs() < 1e-12 && (pm.b - free.b).abs() < 1e-12);

        let m = AnalyticModel::solve(1.5, 1.0, Policy::Threshold { beta: 3 }).unwrap();
        assert_eq!(m.distortion(), theta_threshold(3, 1.5, 1.0).unwrap());
        let pm = m.polygon_means();
        let free = mean_polygon_areas_threshold(3, 1.5, 1.0).unwrap();
        assert!((pm.total() - free.total()).abs() < 1e-12);

        let m = AnalyticModel::solve(0.9, 1.0, Policy::ZeroWait).unwrap();
        assert!((m.distortion().total() - 1.8).abs() < 1e-15);
        assert_eq!(m.mean_wait(), 0.0);
    }

    #[test]
    fn model_rejects_unstable() {
        assert!(AnalyticModel::solve(0.9, 1.0, Policy::Uniform { rate: 1.2 }).is_err());
        assert!(AnalyticModel::solve(2.0, 1.0, Policy::Threshold { beta: 2 }).is_err());
        assert!(AnalyticModel::solve(2.0, 1.0, Policy::Threshold { beta: 0 }).is_err());
    }
}
