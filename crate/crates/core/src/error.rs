use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The queue fed by the requested sampling policy has no steady state.
    #[error("unstable queue: {0}")]
    Unstable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// No admissible parameter exists in the searched range.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no deliveries within the horizon")]
    NoDeliveries,
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite and > 0, got {value}")))
    }
}
