use serde::{Deserialize, Serialize};

use super::roots::solve_z0;
use crate::error::Result;

/// Steady state of the E_β/M/1 queue fed by threshold sampling, as seen by
/// newly generated samples.
///
/// The joint chain has states `(k, b)`: `k` samples in the system and `b`
/// source events since the last sample. A new sample observes `k` with the
/// geometric law `π*_k = z0^{-kβ}(1 - z0^{-β})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErlangChainSolution {
    pub beta: u32,
    pub lambda: f64,
    pub mu: f64,
    pub z0: f64,
    /// `E{q} = 1/(z0^β - 1)`
    pub mean_queue: f64,
    /// `E{w} = E{q}/μ`
    pub mean_wait: f64,
}

impl ErlangChainSolution {
    fn ratio(&self) -> f64 {
        self.z0.powi(-(self.beta as i32))
    }

    /// Normalised probability that a new sample finds `k` samples ahead of it.
    pub fn observed_pmf(&self, k: u32) -> f64 {
        let q = self.ratio();
        q.powi(k as i32) * (1.0 - q)
    }

    /// Unnormalised joint-chain mass `π_{k,0} = (λ/(βμ))(z0 - 1) z0^{-kβ-1}`.
    pub fn raw_observed(&self, k: u32) -> f64 {
        let b = f64::from(self.beta);
        self.lambda / (b * self.mu) * (self.z0 - 1.0) * self.z0.powi(-((k * self.beta) as i32) - 1)
    }

    /// `Π = Σ_k π_{k,0} = λ(z0 - 1) / (βμ z0 (1 - z0^{-β}))`
    pub fn observed_mass(&self) -> f64 {
        let b = f64::from(self.beta);
        self.lambda * (self.z0 - 1.0) / (b * self.mu * self.z0 * (1.0 - self.ratio()))
    }
}

pub fn erlang_chain(beta: u32, lambda: f64, mu: f64) -> Result<ErlangChainSolution> {
    let z0 = solve_z0(beta, lambda, mu)?;
    let mean_queue = 1.0 / (z0.powi(beta as i32) - 1.0);
    Ok(ErlangChainSolution { beta, lambda, mu, z0, mean_queue, mean_wait: mean_queue / mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn unit_threshold_is_mm1_wait() {
        let s = erlang_chain(1, 0.5, 1.0).unwrap();
        assert!((s.mean_wait - 1.0).abs() < 1e-12);
        assert!((s.mean_wait - 0.5 / (1.0 * 0.5)).abs() < 1e-12);
    }

    #[test]
    fn pmf_normalised() {
        for (beta, lambda) in [(1, 0.3), (2, 1.2), (3, 1.5), (5, 4.5)] {
            let s = erlang_chain(beta, lambda, 1.0).unwrap();
            let total: f64 = (0..20_000).map(|k| s.observed_pmf(k)).sum();
            assert!((total - 1.0).abs() < 1e-10, "beta={beta}: {total}");
            let mean: f64 = (0..20_000).map(|k| k as f64 * s.observed_pmf(k)).sum();
            assert!((mean - s.mean_queue).abs() < 1e-8 * s.mean_queue.max(1.0));
        }
    }

    #[test]
    fn raw_mass_normalises_to_pmf() {
        let s = erlang_chain(3, 1.5, 1.0).unwrap();
        let mass: f64 = (0..5_000).map(|k| s.raw_observed(k)).sum();
        assert!((mass - s.observed_mass()).abs() < 1e-12);
        for k in 0..10 {
            assert!((s.raw_observed(k) / s.observed_mass() - s.observed_pmf(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn unstable() {
        assert!(matches!(erlang_chain(2, 2.0, 1.0), Err(Error::Unstable(_))));
    }
}
