//! Experiment runner for the `qrecon` command-line tool.

pub mod error;
pub mod output;
pub mod run;
pub mod spec;
pub mod validate;

pub use error::{CliError, CliResult};
pub use run::{execute, Outcome};
pub use spec::{Cli, ExperimentSpec};
