//! Per-sample partition of the distortion area.
//!
//! Every source event is counted by exactly one sample: the first one taken
//! at or after it. An event at `s` counted by sample `i` contributes
//! `t'_i - s = (t_i - s) + w_i + v_i` to the area. Summed over the events of
//! one sample these three terms are the sampling, waiting and service
//! sub-polygons.

use serde::{Deserialize, Serialize};

use super::{check_fifo, AreaBreakdown, SamplePacket};
use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::stochastic::ProcessPath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonArea {
    /// Index of the delivering sample.
    pub index: u64,
    /// Source events counted first by this sample.
    pub events: u64,
    pub a: f64,
    pub b: f64,
    pub c: Option<f64>,
}

impl PolygonArea {
    pub fn total(&self) -> f64 {
        self.a + self.b + self.c.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonDecomposition {
    pub polygons: Vec<PolygonArea>,
    /// Area of events not delivered by the horizon, up to the horizon.
    pub remainder: f64,
}

impl PolygonDecomposition {
    pub fn total(&self) -> f64 {
        self.polygons.iter().map(PolygonArea::total).sum::<f64>() + self.remainder
    }
}

/// Streaming polygon accounting used by the engine.
#[derive(Debug, Clone)]
pub(crate) struct PolygonTally {
    zero_wait: bool,
    consumed: usize,
    sums: AreaBreakdown,
}

impl PolygonTally {
    pub(crate) fn new(policy: Policy) -> Self {
        let zero_wait = matches!(policy, Policy::ZeroWait);
        let sums = AreaBreakdown { sum_c: (!zero_wait).then_some(0.0), ..AreaBreakdown::default() };
        Self { zero_wait, consumed: 0, sums }
    }

    /// Accounts for `packet`, returning its polygon if it was delivered by
    /// the horizon.
    pub(crate) fn add(&mut self, arrivals: &[f64], packet: &SamplePacket, horizon: f64) -> Option<PolygonArea> {
        let upto = packet.value as usize;
        let events = &arrivals[self.consumed..upto];
        self.consumed = upto;
        if packet.delivery_time > horizon {
            self.sums.remainder += events.iter().map(|s| horizon - s).sum::<f64>();
            return None;
        }
        let n = events.len() as f64;
        let a: f64 = events.iter().map(|s| packet.sample_time - s).sum();
        let (b, c) =
            if self.zero_wait { (n * packet.service, None) } else { (n * packet.wait, Some(n * packet.service)) };
        self.sums.polygons += 1;
        self.sums.sum_a += a;
        self.sums.sum_b += b;
        if let (Some(total), Some(c)) = (self.sums.sum_c.as_mut(), c) {
            *total += c;
        }
        Some(PolygonArea { index: packet.index, events: events.len() as u64, a, b, c })
    }

    /// Charges events after the last sample up to the horizon.
    pub(crate) fn finish(mut self, arrivals: &[f64], horizon: f64) -> AreaBreakdown {
        self.sums.remainder +=
            arrivals[self.consumed..].iter().take_while(|&&s| s <= horizon).map(|s| horizon - s).sum::<f64>();
        self.sums
    }
}

/// Splits the distortion area of a run into per-sample sub-polygons.
///
/// Under zero-wait sampling `b` is the service area and `c` is `None`.
pub fn decompose_polygons(
    path: &ProcessPath,
    packets: &[SamplePacket],
    policy: Policy,
    horizon: f64,
) -> Result<PolygonDecomposition> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::param(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    check_fifo(packets)?;
    let arrivals = path.arrivals();
    let mut tally = PolygonTally::new(policy);
    let mut polygons = Vec::new();
    for p in packets.iter().take_while(|p| p.sample_time <= horizon) {
        if p.value as usize > arrivals.len() {
            return Err(Error::Contract(format!(
                "packet {} counts {} events, path has {}",
                p.index,
                p.value,
                arrivals.len()
            )));
        }
        polygons.extend(tally.add(arrivals, p, horizon));
    }
    let remainder = tally.finish(arrivals, horizon).remainder;
    Ok(PolygonDecomposition { polygons, remainder })
}
