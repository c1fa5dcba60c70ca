use statrs::distribution::{DiscreteCDF, Poisson};

use crate::error::{require_positive, Error, Result};

/// Probability that a `k`-bit counter transmitted with a sample wraps within
/// one sampling interval of length `d`, i.e. `P(N(d) > 2^k - 1)` for Poisson
/// arrivals at rate `λ`.
pub fn overflow_probability(bits: u32, lambda: f64, d: f64) -> Result<f64> {
    require_positive("arrival rate", lambda)?;
    require_positive("sampling interval", d)?;
    if bits >= 64 {
        return Ok(0.0);
    }
    let capacity = (1u64 << bits) - 1;
    let counts = Poisson::new(lambda * d).map_err(|e| Error::Numerical(format!("Poisson({}): {e}", lambda * d)))?;
    Ok(counts.sf(capacity))
}
