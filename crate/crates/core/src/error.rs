use thiserror::Error;

use crate::channel::AggregateClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field}: channel coefficient must be finite and nonzero, got {value}")]
    InvalidCoefficient { field: &'static str, value: f64 },

    #[error("{field}: power must be finite and non-negative, got {value}")]
    InvalidPower { field: &'static str, value: f64 },

    #[error("a channel needs at least one sub-channel")]
    EmptyChannel,

    #[error("operation requires a {expected} channel, but the channel is {found}")]
    ClassMismatch {
        expected: &'static str,
        found: AggregateClass,
    },

    #[error("sub-channel {index} is not {expected}")]
    SubchannelClassMismatch {
        index: usize,
        expected: &'static str,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("channels differ in their coefficients")]
    CoefficientMismatch,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
