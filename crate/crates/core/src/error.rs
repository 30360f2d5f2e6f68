//! Crate-wide error type.
//!
//! Every fallible public operation returns [`Result`]. Variants are grouped by
//! the kind of misuse or failure they report rather than by module, so callers
//! can match on what went wrong without knowing which layer raised it.

use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid could not be constructed (wrong dimension, size not a power of
    /// two, non-positive side length, too few velocity nodes, ...).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// An argument lies outside the mathematical domain of the operation
    /// (projection at ξ = 0, L^p norm with p < 1, modulus radius below 2, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must live on the same grid (or be otherwise
    /// compatible) do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A model object failed validation (asymmetric diffusion matrix, negative
    /// definite direction, flux without the required zeros, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A time step was rejected because it violates the stability restriction.
    /// `max_dt` is the largest admissible step for the current state.
    #[error("time step {dt:.6e} rejected: stability requires dt <= {max_dt:.6e}")]
    CflViolation { dt: f64, max_dt: f64 },

    /// A configuration file or value could not be interpreted.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A binary or CSV payload did not match the expected format.
    #[error("malformed data: {0}")]
    MalformedData(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for [`Error::InvalidGrid`] from any displayable message.
    pub fn grid(msg: impl Into<String>) -> Self {
        Error::InvalidGrid(msg.into())
    }

    /// Shorthand for [`Error::Domain`].
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Shorthand for [`Error::ShapeMismatch`].
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    /// Shorthand for [`Error::InvalidModel`].
    pub fn model(msg: impl Into<String>) -> Self {
        Error::InvalidModel(msg.into())
    }

    /// Shorthand for [`Error::InvalidConfig`].
    pub fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    /// Shorthand for [`Error::MalformedData`].
    pub fn data(msg: impl Into<String>) -> Self {
        Error::MalformedData(msg.into())
    }
}
