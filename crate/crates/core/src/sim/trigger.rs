//! Sampling instants for the three policies.

use crate::error::{require_positive, Error, Result};
use crate::policy::Policy;
use crate::stochastic::ProcessPath;

/// Stateful trigger shared by the engine and the public helpers.
#[derive(Debug, Clone)]
pub(crate) enum Trigger {
    Uniform { interval: f64, next: u64 },
    Threshold { beta: usize, next: usize },
    ZeroWait { started: bool },
}

impl Trigger {
    pub(crate) fn new(policy: Policy) -> Self {
        match policy {
            Policy::Uniform { rate } => Trigger::Uniform { interval: 1.0 / rate, next: 1 },
            Policy::Threshold { beta } => Trigger::Threshold { beta: beta as usize, next: beta as usize },
            Policy::ZeroWait => Trigger::ZeroWait { started: false },
        }
    }

    /// Next sampling instant within `[0, horizon]`. `server_idle_at` is when
    /// the server finishes its current backlog.
    pub(crate) fn next(&mut self, arrivals: &[f64], server_idle_at: f64, horizon: f64) -> Option<f64> {
        let t = match self {
            Trigger::Uniform { interval, next } => {
                let t = *next as f64 * *interval;
                *next += 1;
                t
            }
            Trigger::Threshold { beta, next } => {
                let t = *arrivals.get(*next - 1)?;
                *next += *beta;
                t
            }
            Trigger::ZeroWait { started } => {
                if *started {
                    server_idle_at
                } else {
                    *started = true;
                    0.0
                }
            }
        };
        (t <= horizon).then_some(t)
    }
}

/// `{i d : i ≥ 1, i d ≤ T}`
pub fn sample_trigger_uniform(interval: f64, horizon: f64) -> Result<Vec<f64>> {
    require_positive("sampling interval", interval)?;
    check_horizon(horizon)?;
    let mut trigger = Trigger::new(Policy::Uniform { rate: 1.0 / interval });
    if let Trigger::Uniform { interval: d, .. } = &mut trigger {
        // keep the caller's interval exactly rather than 1/(1/d)
        *d = interval;
    }
    Ok(std::iter::from_fn(|| trigger.next(&[], 0.0, horizon)).collect())
}

/// Arrival instants of events `β, 2β, 3β, ...`
pub fn sample_trigger_threshold(beta: u32, path: &ProcessPath) -> Result<Vec<f64>> {
    if beta == 0 {
        return Err(Error::param("threshold beta must be >= 1"));
    }
    let mut trigger = Trigger::new(Policy::Threshold { beta });
    Ok(std::iter::from_fn(|| trigger.next(path.arrivals(), 0.0, path.horizon())).collect())
}

/// Sampling instants when each sample is served on delivery of the previous
/// one: `0, v_1, v_1 + v_2, ...` up to the horizon.
pub fn sample_trigger_zero_wait(services: &[f64], horizon: f64) -> Result<Vec<f64>> {
    check_horizon(horizon)?;
    let mut trigger = Trigger::new(Policy::ZeroWait);
    let mut out = Vec::new();
    let mut idle_at = 0.0;
    let mut services = services.iter();
    while let Some(t) = trigger.next(&[], idle_at, horizon) {
        out.push(t);
        match services.next() {
            Some(&v) => idle_at = t + v,
            None => break,
        }
    }
    Ok(out)
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("horizon must be finite and >= 0, got {horizon}")))
    }
}
