use rand_chacha::ChaCha8Rng;

use super::rng::{exponential, stream_rng, Stream};
use super::step::StepTrace;
use crate::error::{require_positive, Error, Result};

/// Realised arrival instants of a Poisson counting process on `(0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessPath {
    rate: f64,
    horizon: f64,
    arrivals: Vec<f64>,
}

impl ProcessPath {
    /// Wraps externally produced arrival times after checking that they are
    /// strictly increasing and inside `(0, horizon]`.
    pub fn new(rate: f64, horizon: f64, arrivals: Vec<f64>) -> Result<Self> {
        require_positive("arrival rate", rate)?;
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::param(format!("horizon must be finite and >= 0, got {horizon}")));
        }
        let mut prev = 0.0;
        for &s in &arrivals {
            if !(s > prev && s <= horizon) {
                return Err(Error::param(format!(
                    "arrival times must be strictly increasing in (0, {horizon}], found {s} after {prev}"
                )));
            }
            prev = s;
        }
        Ok(Self { rate, horizon, arrivals })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    /// N(t): number of arrivals in `(0, t]`.
    pub fn count_at(&self, t: f64) -> usize {
        self.arrivals.partition_point(|&s| s <= t)
    }

    /// Interarrival gaps `X_n = s_n - s_{n-1}` with `s_0 = 0`.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        let mut prev = 0.0;
        self.arrivals.iter().map(move |&s| {
            let gap = s - prev;
            prev = s;
            gap
        })
    }

    /// N(t) as a unit-step trace.
    pub fn to_step_trace(&self) -> StepTrace {
        let steps = self.arrivals.iter().enumerate().map(|(i, &s)| (s, i as i64 + 1)).collect();
        StepTrace::from_sorted_unchecked(0, steps)
    }
}

/// Lazily yields the arrival instants of a Poisson process.
#[derive(Debug, Clone)]
pub struct ArrivalClock {
    rng: ChaCha8Rng,
    rate: f64,
    now: f64,
}

impl ArrivalClock {
    pub fn new(rate: f64, seed: u64) -> Result<Self> {
        require_positive("arrival rate", rate)?;
        Ok(Self { rng: stream_rng(seed, Stream::Arrivals), rate, now: 0.0 })
    }

    /// Next arrival instant. Successive values are strictly increasing except
    /// when a gap underflows below the float spacing, in which case it is
    /// redrawn.
    pub fn next_arrival(&mut self) -> f64 {
        loop {
            let next = self.now + exponential(&mut self.rng, self.rate);
            if next > self.now {
                self.now = next;
                return next;
            }
        }
    }
}

/// Exponential service-time model with rate `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceModel {
    rate: f64,
}

impl ServiceModel {
    pub fn new(rate: f64) -> Result<Self> {
        require_positive("service rate", rate)?;
        Ok(Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.rate
    }

    /// f(x) = μ e^{-μx}
    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }
}

/// Generates a Poisson path of rate `lambda` on `(0, horizon]`.
///
/// The same `(lambda, horizon, seed)` always yields the same path, and it is
/// the path the simulator sees for a run with that seed.
pub fn generate_poisson_path(lambda: f64, horizon: f64, seed: u64) -> Result<ProcessPath> {
    require_positive("arrival rate", lambda)?;
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::param(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    let mut clock = ArrivalClock::new(lambda, seed)?;
    let mut arrivals = Vec::with_capacity((lambda * horizon * 1.05) as usize + 16);
    loop {
        let s = clock.next_arrival();
        if s > horizon {
            break;
        }
        arrivals.push(s);
    }
    Ok(ProcessPath { rate: lambda, horizon, arrivals })
}
