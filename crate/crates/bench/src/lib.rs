//! Shared fixtures for the criterion benches.

use qrecon_core::{simulate_recorded, InterpolationMode, Policy, SimConfig, SimRun};

pub const LAMBDA: f64 = 0.9;
pub const MU: f64 = 1.0;

/// Uniform sampling at the rate that minimises distortion for the default load.
pub fn uniform_config(horizon: f64, mode: InterpolationMode) -> SimConfig {
    SimConfig::new(LAMBDA, MU, Policy::Uniform { rate: 0.5 }, horizon, 1).with_interpolation(mode)
}

/// A recorded run whose path and packets feed the reconstruction benches.
pub fn recorded_run(horizon: f64) -> SimRun {
    simulate_recorded(&uniform_config(horizon, InterpolationMode::Off)).expect("fixture run")
}
