use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The integrator could not meet its tolerance.
    #[error("integration failed at tau = {tau}: {reason} (achieved step {step:e})")]
    Integration { tau: f64, step: f64, reason: &'static str },

    /// A formula was evaluated outside the regime in which it holds.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A quantity that must be non-negative came out negative.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
