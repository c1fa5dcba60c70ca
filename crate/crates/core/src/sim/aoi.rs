use super::SamplePacket;
use crate::error::{Error, Result};

/// Streaming integral of the age of information.
///
/// Age is `t - g(t)` where `g` is the generation time of the freshest
/// delivered sample, with `g = 0` before the first delivery.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgeAccumulator {
    last: f64,
    generated: f64,
    area: f64,
    updates: u64,
}

impl AgeAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    fn advance(&mut self, to: f64) {
        if to > self.last {
            // mean of the two ages, written to avoid cancellation at large t
            self.area += (to - self.last) * 0.5 * ((to - self.generated) + (self.last - self.generated));
            self.last = to;
        }
    }

    /// Records a delivery at `delivered` of a sample generated at `generated`.
    pub fn deliver(&mut self, delivered: f64, generated: f64) {
        self.advance(delivered);
        if generated > self.generated {
            self.generated = generated;
        }
        self.updates += 1;
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// Time-average age over `[0, horizon]`, or `None` before any delivery.
    pub fn mean(mut self, horizon: f64) -> Option<f64> {
        if self.updates == 0 || horizon <= 0.0 {
            return None;
        }
        self.advance(horizon);
        Some(self.area / horizon)
    }
}

/// Time-averaged age of information over `[0, horizon]` for packets sorted by
/// delivery. Deliveries after the horizon are ignored.
pub fn measure_aoi(packets: &[SamplePacket], horizon: f64) -> Result<f64> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::param(format!("horizon must be finite and > 0, got {horizon}")));
    }
    let mut acc = AgeAccumulator::new();
    let mut last = f64::NEG_INFINITY;
    for p in packets.iter().take_while(|p| p.delivery_time <= horizon) {
        if p.delivery_time < last {
            return Err(Error::Contract(format!("packet {} delivered out of order", p.index)));
        }
        last = p.delivery_time;
        acc.deliver(p.delivery_time, p.sample_time);
    }
    acc.mean(horizon).ok_or(Error::NoDeliveries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(index: u64, sample_time: f64, delivery_time: f64) -> SamplePacket {
        SamplePacket {
            index,
            sample_time,
            value: 0,
            service_start: sample_time,
            wait: 0.0,
            service: delivery_time - sample_time,
            delivery_time,
        }
    }

    #[test]
    fn single_update_from_time_zero() {
        let age = measure_aoi(&[packet(1, 0.0, 3.0)], 10.0).unwrap();
        assert!((age - 5.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_sawtooth() {
        // period p, constant delay c: mean age c + p/2 once in steady state
        let (p, c) = (2.0, 0.75);
        let n = 10_000;
        let packets: Vec<_> = (1..=n).map(|i| packet(i, i as f64 * p, i as f64 * p + c)).collect();
        let horizon = n as f64 * p + c;
        let age = measure_aoi(&packets, horizon).unwrap();
        let expected = c + p / 2.0;
        // the first cycle's start-up sawtooth is the only deviation
        assert!((age - expected).abs() < 5.0 / n as f64, "{age} vs {expected}");
    }

    #[test]
    fn errors() {
        assert_eq!(measure_aoi(&[], 10.0), Err(Error::NoDeliveries));
        assert_eq!(measure_aoi(&[packet(1, 5.0, 20.0)], 10.0), Err(Error::NoDeliveries));
        assert!(measure_aoi(&[packet(1, 0.0, 1.0)], 0.0).is_err());
        assert!(matches!(measure_aoi(&[packet(1, 0.0, 2.0), packet(2, 0.5, 1.0)], 10.0), Err(Error::Contract(_))));
    }
}
