use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Sampling policy applied at the source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    /// Samples at `t_i = i / rate`.
    Uniform { rate: f64 },
    /// Samples at the arrival instant of every `beta`-th source event.
    Threshold { beta: u32 },
    /// Samples whenever the server becomes idle, starting at t = 0.
    ZeroWait,
}

impl Policy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Policy::Uniform { rate } => require_positive("sampling rate", rate),
            Policy::Threshold { beta: 0 } => Err(Error::param("threshold beta must be >= 1")),
            _ => Ok(()),
        }
    }

    /// Short lowercase name used in tables and file names.
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Uniform { .. } => "uniform",
            Policy::Threshold { .. } => "threshold",
            Policy::ZeroWait => "zero_wait",
        }
    }

    /// The policy parameter (rate or threshold), if any.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            Policy::Uniform { rate } => Some(rate),
            Policy::Threshold { beta } => Some(f64::from(beta)),
            Policy::ZeroWait => None,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Uniform { rate } => write!(f, "uniform(r={rate})"),
            Policy::Threshold { beta } => write!(f, "threshold(beta={beta})"),
            Policy::ZeroWait => write!(f, "zero_wait"),
        }
    }
}
