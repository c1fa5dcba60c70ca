//! Seeded random generation and exact step-function algebra.

mod order_stats;
mod path;
pub mod rng;
mod step;

pub use order_stats::{order_statistics_oracle, OrderStatEstimate};
pub use path::{generate_poisson_path, ArrivalClock, ProcessPath, ServiceModel};
pub use step::{integrate_difference, Area, DifferenceAccumulator, StepTrace, StepTraceBuilder};
