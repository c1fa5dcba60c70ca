//! Event-driven simulation of sampler, FIFO queue, exponential server and
//! monitor.
//!
//! A run merges three event streams on one timeline: source arrivals, sample
//! instants and deliveries. Equal timestamps are ordered arrival, then sample,
//! then delivery, so a sample taken at `t` includes an event at `t`.
//! Every quantity is integrated exactly from event times.

mod aoi;
mod engine;
mod polygons;
mod trigger;

use serde::{Deserialize, Serialize};

use crate::analytic::PolygonMeans;
use crate::error::{require_positive, Error, Result};
use crate::interpolation::InterpolationMode;
use crate::policy::Policy;
use crate::stochastic::{ProcessPath, StepTrace};

pub use aoi::{measure_aoi, AgeAccumulator};
pub use engine::{simulate, simulate_recorded};
pub use polygons::{decompose_polygons, PolygonArea, PolygonDecomposition};
pub use trigger::{sample_trigger_threshold, sample_trigger_uniform, sample_trigger_zero_wait};

/// Terminal backlog above which a run is flagged unstable.
pub const DEFAULT_UNSTABLE_BACKLOG: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub lambda: f64,
    pub mu: f64,
    pub policy: Policy,
    pub horizon: f64,
    pub seed: u64,
    pub interpolation: InterpolationMode,
    pub unstable_backlog: u64,
}

impl SimConfig {
    pub fn new(lambda: f64, mu: f64, policy: Policy, horizon: f64, seed: u64) -> Self {
        Self {
            lambda,
            mu,
            policy,
            horizon,
            seed,
            interpolation: InterpolationMode::Off,
            unstable_backlog: DEFAULT_UNSTABLE_BACKLOG,
        }
    }

    pub fn with_interpolation(mut self, mode: InterpolationMode) -> Self {
        self.interpolation = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("arrival rate", self.lambda)?;
        require_positive("service rate", self.mu)?;
        require_positive("horizon", self.horizon)?;
        self.policy.validate()
    }
}

/// Lifecycle of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePacket {
    /// 1-based sample index.
    pub index: u64,
    pub sample_time: f64,
    /// Source count at the sampling instant.
    pub value: u64,
    pub service_start: f64,
    pub wait: f64,
    pub service: f64,
    pub delivery_time: f64,
}

impl SamplePacket {
    pub fn system_time(&self) -> f64 {
        self.wait + self.service
    }
}

/// Distortion area split over the polygons of delivered samples.
///
/// Events still undelivered at the horizon are charged to `remainder`, so
/// `sum_a + sum_b + sum_c + remainder` is the full integral over `[0, T]`.
/// Under zero-wait sampling `sum_b` holds the service area and `sum_c` is
/// `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AreaBreakdown {
    pub polygons: u64,
    pub sum_a: f64,
    pub sum_b: f64,
    pub sum_c: Option<f64>,
    pub remainder: f64,
}

impl AreaBreakdown {
    pub fn total(&self) -> f64 {
        self.sum_a + self.sum_b + self.sum_c.unwrap_or(0.0) + self.remainder
    }

    /// Per-polygon means, if any sample was delivered.
    pub fn means(&self) -> Option<PolygonMeans> {
        if self.polygons == 0 {
            return None;
        }
        let n = self.polygons as f64;
        Some(PolygonMeans { a: self.sum_a / n, b: self.sum_b / n, c: self.sum_c.map(|c| c / n) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub policy: Policy,
    pub interpolation: InterpolationMode,
    pub lambda: f64,
    pub mu: f64,
    pub horizon: f64,
    pub seed: u64,
    /// `(1/T) ∫ (N - N̂)`
    pub theta_hat: f64,
    /// `(1/T) ∫ |N - N̂|`
    pub abs_theta_hat: f64,
    /// Mean wait plus service over delivered samples.
    pub mean_delay: Option<f64>,
    pub mean_wait: Option<f64>,
    pub mean_aoi: Option<f64>,
    /// Samples taken within `[0, T]`.
    pub sample_count: u64,
    pub delivered: u64,
    /// Samples taken but not delivered by `T`.
    pub backlog: u64,
    pub unstable: bool,
    /// Breakdown of the uninterpolated reconstruction.
    pub area: AreaBreakdown,
}

/// A run with its artifacts kept.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub report: DistortionReport,
    pub path: ProcessPath,
    /// All samples taken within `[0, T]`, delivered or not.
    pub packets: Vec<SamplePacket>,
    /// The reconstruction that was scored.
    pub reconstruction: StepTrace,
}

impl SimRun {
    /// Packets delivered within the horizon.
    pub fn delivered(&self) -> &[SamplePacket] {
        let horizon = self.report.horizon;
        let n = self.packets.partition_point(|p| p.delivery_time <= horizon);
        &self.packets[..n]
    }
}

pub(crate) fn check_fifo(packets: &[SamplePacket]) -> Result<()> {
    for pair in packets.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.delivery_time.partial_cmp(&a.delivery_time) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Contract(format!(
                "packet {} delivered at {} after packet {} at {}",
                a.index, a.delivery_time, b.index, b.delivery_time
            )));
        }
        if b.value < a.value || b.sample_time < a.sample_time {
            return Err(Error::Contract(format!(
                "packet {} precedes packet {} but carries a later sample",
                a.index, b.index
            )));
        }
    }
    Ok(())
}
