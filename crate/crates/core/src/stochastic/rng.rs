//! Independent reproducible random streams.
//!
//! Every pipeline stage draws from its own ChaCha8 stream derived from the
//! run seed, so enabling one stage (e.g. interpolation) never shifts the
//! draws seen by another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifies one random stream of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Arrivals,
    Service,
    OrderStatistics,
    /// Interpolation draws for one delivered packet.
    Insertion(u64),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Arrivals => 1,
            Stream::Service => 2,
            Stream::OrderStatistics => 3,
            Stream::Insertion(packet) => (1 << 32) + packet,
        }
    }
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}

/// Exponential draw by inverse CDF.
#[inline]
pub fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    // 1 - U lies in (0, 1], so the logarithm is finite.
    -(1.0 - rng.random::<f64>()).ln() / rate
}

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
