use thiserror::Error;

/// Errors raised by the analytic, simulation and harness layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration file or preset is malformed or inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// An operation was called in a way its contract forbids.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A numerical evaluation failed (non-finite result, contour not separable, ...).
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn eval(msg: impl Into<String>) -> Error {
    Error::Evaluation(msg.into())
}
