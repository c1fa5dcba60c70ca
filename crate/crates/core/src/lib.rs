//! Real-time reconstruction of a Poisson counting process observed through a
//! FIFO single-server queue with exponential service.
//!
//! The crate has five layers:
//!
//! - [`stochastic`]: seeded Poisson paths, exponential service draws and exact
//!   step-function algebra.
//! - [`analytic`]: closed-form average distortion under uniform, threshold and
//!   zero-wait sampling, the D/M/1 and E_β/M/1 solutions behind them, the
//!   interpolation lower bound and the packet overflow probability.
//! - [`sim`]: an event-driven simulator of the sampler, queue, server and
//!   monitor that integrates the distortion exactly.
//! - [`interpolation`]: monitor-side insertion of guessed steps and the oracle
//!   reconstruction that attains the lower bound.
//! - [`optimize`]: the distortion-minimising sampling rate and threshold.

pub mod analytic;
pub mod error;
pub mod interpolation;
pub mod optimize;
pub mod policy;
pub mod sim;
pub mod stochastic;

pub use analytic::{
    erlang_chain, lower_bound_theta, overflow_probability, solve_sigma, solve_z0, theta_threshold, theta_uniform,
    theta_zero_wait, AnalyticModel, DistortionBreakdown, ErlangChainSolution, LowerBound,
};
pub use error::{Error, Result};
pub use interpolation::{InterpolationMode, InterpolationPlan};
pub use optimize::{optimal_rate, optimal_threshold, RateOptimum, ThresholdOptimum};
pub use policy::Policy;
pub use sim::{simulate, simulate_recorded, DistortionReport, SamplePacket, SimConfig, SimRun};
pub use stochastic::{generate_poisson_path, integrate_difference, ProcessPath, StepTrace};
