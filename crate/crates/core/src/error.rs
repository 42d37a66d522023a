// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors raised across the detection pipeline.
#[derive(Debug, Error)]
pub enum MscpError {
    /// Invalid distribution or scenario parameters.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// An index, window or lattice point outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inconsistent detector, calibration or CLI configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed input data.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    /// An internal invariant did not hold.
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl MscpError {
    pub(crate) fn parameter(message: impl Into<String>) -> Self {
        Self::Parameter(message.into())
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Self::Domain(message.into())
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Self::Config(message.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invariant(_) => 3,
            Self::Io(_) | Self::Json(_) | Self::Csv(_) => 2,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, MscpError>;
