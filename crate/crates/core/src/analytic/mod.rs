//! Closed-form average distortion and the queueing solutions behind it.
//!
//! Under uniform sampling the queue is D/M/1 and its delay is governed by
//! the root σ of `σ = exp(-(μ/r)(1-σ))`. Under threshold sampling it is
//! E_β/M/1, governed by the real root `z0 > 1` of
//! `(λ/μ) z^{β+1} - (1 + λ/μ) z^β + 1`. Zero-wait sampling needs neither.

mod distortion;
mod erlang;
mod lower_bound;
mod model;
mod overflow;
pub mod quadrature;
mod roots;

pub use distortion::{
    mean_polygon_areas_threshold, mean_polygon_areas_uniform, mean_polygon_areas_zero_wait, theta_threshold,
    theta_uniform, theta_zero_wait, DistortionBreakdown, PolygonMeans,
};
pub use erlang::{erlang_chain, ErlangChainSolution};
pub use lower_bound::{
    lower_bound_flattened, lower_bound_theta, lower_bound_theta_with, BoundForm, DelayDistribution, LowerBound,
    DEFAULT_SERIES_TOL,
};
pub use model::AnalyticModel;
pub use overflow::overflow_probability;
pub use roots::{sigma_residual, solve_sigma, solve_z0, z0_residual};
