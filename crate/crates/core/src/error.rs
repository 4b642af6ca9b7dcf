use thiserror::Error;

/// Failures raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The input is geometrically degenerate (collinear axes, vanishing rapidities, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// A sequence or loop that must fix the starting frame does not.
    #[error("sequence is not closed: residual boost rapidity {residual:.3e}")]
    NotClosed { residual: f64 },
    /// Two routes to the same quantity disagree beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
