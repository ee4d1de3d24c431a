//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("header mismatch: {0}")]
    HeaderMismatch(String),
    #[error("missing or invalid factor kinds: {0}")]
    MissingKinds(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("neural estimator diverged: {0}")]
    TrainingDiverged(String),
    #[error("estimator {estimator} is not applicable: {reason}")]
    IncompatibleEstimator { estimator: String, reason: String },
    #[error("factor {0} is constant")]
    DegenerateFactor(usize),
    #[error("code {0} has zero variance")]
    DegenerateCode(usize),
    #[error("factor {0} has zero entropy")]
    ZeroEntropyFactor(usize),
    #[error("code {0} has zero entropy")]
    ZeroEntropyCode(usize),
    #[error("code {0} has zero mutual information with every factor")]
    ZeroMaxMi(usize),
    #[error("every importance for factor {0} is zero")]
    AllZeroImportance(usize),
    #[error("invalid boundary case: {0}")]
    InvalidCase(String),
    #[error("cannot draw {requested} rows from {available}")]
    TooFewRequested { requested: usize, available: usize },
    #[error("report lacks metric {0}")]
    MissingMetric(String),
    #[error("zero variance input")]
    ZeroVariance,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown metric: {0}")]
    UnknownMetric(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
