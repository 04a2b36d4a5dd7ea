use std::path::PathBuf;

use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid profile `{workload}`: {report}")]
    InvalidProfile {
        workload: String,
        report: ValidationReport,
    },

    #[error("metric `{metric}`: zero denominator")]
    ZeroDenominator { metric: String },

    #[error("metric `{metric}` is a ratio but evaluated to {value}")]
    RatioOutOfRange { metric: String, value: f64 },

    #[error("metric `{metric}` is not finite")]
    NonFinite { metric: String },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("no steady-state samples after {warmup_s} s warm-up")]
    NoSteadyState { warmup_s: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the file system rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
