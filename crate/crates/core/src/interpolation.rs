//! Monitor-side reconstruction.
//!
//! The plain monitor holds the last delivered value. Uniform interpolation
//! guesses the events a delivery reveals: when sample `i` raises the level by
//! more than one, the `J = N(t_i) - N̂(t'_{i-1}) - 1` missing unit steps are
//! placed at sorted uniform instants in `(t'_{i-1}, t'_i)`. The oracle
//! strategy, which needs the true path, follows `min(N(t), N(t_i))` on
//! `[t'_{i-1}, t'_i)` and attains the interpolation lower bound.
//!
//! Only packets delivered within the horizon are used; after the last one the
//! level is held.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{check_fifo, SamplePacket};
use crate::stochastic::rng::{open_unit, stream_rng, Stream};
use crate::stochastic::{ProcessPath, StepTrace, StepTraceBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationMode {
    #[default]
    Off,
    /// One unit step at a uniform instant whenever `J > 0`.
    SinglePoint,
    /// `J` unit steps at sorted uniform instants.
    UniformJ,
    /// Tracks the true path; test and bound estimation only.
    Oracle,
}

impl InterpolationMode {
    pub const ALL: [InterpolationMode; 4] = [
        InterpolationMode::Off,
        InterpolationMode::SinglePoint,
        InterpolationMode::UniformJ,
        InterpolationMode::Oracle,
    ];

    /// Short name used on the command line and in CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            InterpolationMode::Off => "off",
            InterpolationMode::SinglePoint => "single",
            InterpolationMode::UniformJ => "uniform",
            InterpolationMode::Oracle => "oracle",
        }
    }
}

impl fmt::Display for InterpolationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InterpolationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "off" | "none" => Ok(InterpolationMode::Off),
            "single" | "single_point" => Ok(InterpolationMode::SinglePoint),
            "uniform" | "uniform_j" => Ok(InterpolationMode::UniformJ),
            "oracle" | "oracle_lower_bound" => Ok(InterpolationMode::Oracle),
            other => Err(Error::param(format!("unknown interpolation mode '{other}' (off|single|uniform|oracle)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationPlan {
    pub mode: InterpolationMode,
    /// Run seed; packet `i` draws from its own insertion stream.
    pub seed: u64,
}

fn delivered(packets: &[SamplePacket], horizon: f64) -> Result<&[SamplePacket]> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::param(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    check_fifo(packets)?;
    let n = packets.partition_point(|p| p.delivery_time <= horizon);
    Ok(&packets[..n])
}

/// Holds the value of the last delivered sample.
pub fn plain_reconstruction(packets: &[SamplePacket], horizon: f64) -> Result<StepTrace> {
    let mut trace = StepTraceBuilder::new(0);
    for p in delivered(packets, horizon)? {
        trace.push(p.delivery_time, p.value as i64)?;
    }
    Ok(trace.build())
}

/// Applies `plan` to the delivered packets. The oracle mode needs the source
/// path and is served by [`oracle_reconstruction`].
pub fn reconstruct_with_interpolation(
    packets: &[SamplePacket],
    plan: &InterpolationPlan,
    horizon: f64,
) -> Result<StepTrace> {
    let insert_all = match plan.mode {
        InterpolationMode::Off => return plain_reconstruction(packets, horizon),
        InterpolationMode::Oracle => {
            return Err(Error::param("oracle reconstruction needs the source path"));
        }
        InterpolationMode::SinglePoint => false,
        InterpolationMode::UniformJ => true,
    };
    let mut trace = StepTraceBuilder::new(0);
    let mut since = 0.0_f64;
    let mut times = Vec::new();
    for p in delivered(packets, horizon)? {
        let level = trace.current();
        let missing = p.value as i64 - level - 1;
        if missing > 0 {
            let mut rng = stream_rng(plan.seed, Stream::Insertion(p.index));
            let span = p.delivery_time - since;
            let draws = if insert_all { missing } else { 1 };
            times.clear();
            times.extend((0..draws).map(|_| since + open_unit(&mut rng) * span));
            times.sort_by(f64::total_cmp);
            let mut next = level;
            for &t in &times {
                // rounding can land a draw on an endpoint; such a guess is dropped
                if t > since && t < p.delivery_time {
                    next += 1;
                    trace.push(t, next)?;
                }
            }
        }
        trace.push(p.delivery_time, p.value as i64)?;
        since = p.delivery_time;
    }
    Ok(trace.build())
}

/// The reconstruction that reveals each counted event as early as the
/// delivered information allows: `min(N(t), N(t_i))` on `[t'_{i-1}, t'_i)`,
/// with `t'_0 = 0`.
pub fn oracle_reconstruction(path: &ProcessPath, packets: &[SamplePacket], horizon: f64) -> Result<StepTrace> {
    let arrivals = path.arrivals();
    let mut trace = StepTraceBuilder::new(0);
    let mut since = 0.0_f64;
    // arrivals at or before `since`
    let mut seen = 0usize;
    for p in delivered(packets, horizon)? {
        let cap = p.value as usize;
        if cap > arrivals.len() {
            return Err(Error::Contract(format!(
                "packet {} counts {} events, path has {}",
                p.index,
                p.value,
                arrivals.len()
            )));
        }
        seen += arrivals[seen..].partition_point(|&s| s <= since);
        trace.push(since, seen.min(cap) as i64)?;
        let mut k = seen;
        while k < cap && arrivals[k] < p.delivery_time {
            k += 1;
            trace.push(arrivals[k - 1], k as i64)?;
        }
        trace.push(p.delivery_time, p.value as i64)?;
        since = p.delivery_time;
    }
    Ok(trace.build())
}
