use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong between reading a score file and writing a report.
#[derive(Debug, Error)]
pub enum CsdError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("score {value} for model '{model}' on dataset '{dataset}' is outside [0, 100]")]
    Domain {
        model: String,
        dataset: String,
        value: f64,
    },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("duplicate model '{0}'")]
    DuplicateModel(String),

    #[error("dataset '{0}' appears more than once")]
    DuplicateDataset(String),

    #[error("unknown dataset '{0}'")]
    UnknownDataset(String),

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("missing score for model '{model}' on dataset '{dataset}'")]
    MissingScore { model: String, dataset: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance too large for exact enumeration: {what} = {actual} exceeds limit {limit}")]
    InstanceTooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("model index {0} is not active")]
    InactiveModel(usize),

    #[error("question '{0}' has no recorded outcome")]
    EmptyQuestion(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CsdError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CsdError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CsdError>;
