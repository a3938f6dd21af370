//! Error type for precondition violations and invalid configuration.
//!
//! Degenerate data situations that a threshold sweep must skip gracefully
//! (ties among top order statistics, nonpositive finite-sample estimates)
//! are not errors; they are reported in-band via
//! [`EstimateFailure`](crate::tail::EstimateFailure).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} input components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("dataset must contain at least one observation")]
    EmptyDataset,

    #[error("empty conditioning set: no observation is dominated by the query point")]
    EmptyConditioningSet,

    #[error("threshold k={k} outside admissible range {min}..={max}")]
    KOutOfRange { k: usize, min: usize, max: usize },

    #[error("nonpositive threshold value z={value} at k={k}: log-spacings undefined")]
    NonpositiveThresholdValue { k: usize, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("insufficient stable range: {0}")]
    InsufficientStableRange(String),

    #[error("insufficient sample: need at least {needed} dominated observations, have {got}")]
    InsufficientSample { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
