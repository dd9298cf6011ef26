use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series constant term must be zero, got {0}")]
    NonZeroConstant(f64),

    #[error("series constant term must be strictly positive, got {0}")]
    NonPositiveConstant(f64),

    #[error("series constant term must be nonzero for division")]
    ZeroDivisor,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stereographic map is singular at u_z = -1")]
    Pole,

    #[error("mean of S_z vanishes, fluctuation ratio undefined")]
    VanishingMean,

    #[error("spin temperature undefined: sum of m.B vanishes")]
    VanishingDenominator,

    #[error("measurement window is empty")]
    EmptyMeasurement,

    #[error("LLG step failed: {0}")]
    Integration(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    /// `true` for failures caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidParameter(_) | Error::Io { .. } | Error::Format { .. }
        )
    }
}
