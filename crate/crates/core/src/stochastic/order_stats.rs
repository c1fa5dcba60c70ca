use super::rng::{exponential, stream_rng, Stream};
use crate::error::{require_positive, Error, Result};

/// Monte-Carlo estimate of `E{Σ s_k | N(d) = n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderStatEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    /// Poisson paths drawn, including rejected ones.
    pub attempts: usize,
}

/// Estimates the mean of the sum of occurrence times of a Poisson process on
/// `(0, d]` conditioned on exactly `n` events.
///
/// Paths are generated from exponential gaps and rejected unless they hold
/// exactly `n` events, so the estimate does not presuppose that conditioned
/// arrival times are uniform order statistics. The rate is `n / d`, which
/// maximises the acceptance probability.
pub fn order_statistics_oracle(n: usize, d: f64, trials: usize, seed: u64) -> Result<OrderStatEstimate> {
    if n == 0 {
        return Err(Error::param("event count n must be >= 1"));
    }
    require_positive("interval d", d)?;
    if trials == 0 {
        return Err(Error::param("trials must be >= 1"));
    }
    let rate = n as f64 / d;
    let mut rng = stream_rng(seed, Stream::OrderStatistics);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < trials {
        attempts += 1;
        let mut t = 0.0;
        let mut total = 0.0;
        let mut count = 0;
        loop {
            t += exponential(&mut rng, rate);
            if t > d || count > n {
                break;
            }
            total += t;
            count += 1;
        }
        if count == n {
            accepted += 1;
            sum += total;
            sum_sq += total * total;
        }
    }
    let m = accepted as f64;
    let mean = sum / m;
    let var = if accepted > 1 { (sum_sq - m * mean * mean) / (m - 1.0) } else { 0.0 };
    Ok(OrderStatEstimate { mean, std_error: (var.max(0.0) / m).sqrt(), trials: accepted, attempts })
}
