use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator and its front end.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its documented domain.
    #[error("{field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// Requested analysis needs more data than was supplied.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A measured variance pair has no physical (loss, squeeze) solution.
    #[error("infeasible quadrature variances: squeezed {squeezed} x anti-squeezed {anti_squeezed} < 1")]
    Infeasible { squeezed: f64, anti_squeezed: f64 },

    /// Least-squares fit could not be computed.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Trace unit does not match what the operation expects.
    #[error("unit mismatch: expected {expected}, found {found}")]
    UnitMismatch { expected: String, found: String },

    /// Configuration document could not be read or parsed.
    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefix the field path of a parameter error, e.g. `rbw` -> `analysis.rbw`.
    pub fn within(self, section: &str) -> Self {
        match self {
            Error::InvalidParameter { field, reason } => Error::InvalidParameter {
                field: format!("{section}.{field}"),
                reason,
            },
            other => other,
        }
    }

    /// True for errors caused by bad user input rather than a failing run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Config { .. } | Error::UnitMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, field: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(field, reason))
    }
}
