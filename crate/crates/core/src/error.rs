use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: feature {feature} (#{index}): {message}")]
    Schema {
        path: String,
        index: usize,
        feature: String,
        message: String,
    },

    #[error("{path}: feature {feature} (#{index}): invalid geometry: {message}")]
    Geometry {
        path: String,
        index: usize,
        feature: String,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("deposit {deposit} spans {extent_km:.0} km, split it into parts below {limit_km:.0} km")]
    SplitRequired {
        deposit: String,
        extent_km: f64,
        limit_km: f64,
    },

    #[error("{quantity} = {value} outside table range [{min}, {max}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("mask dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("placement rejected for deposit {deposit}: {reason}")]
    PlacementRejected { deposit: String, reason: String },

    #[error("{stage} failed for {entity}: {source}")]
    Stage {
        stage: &'static str,
        entity: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Runtime(String),

    #[error("input datasets differ between runs: {0}")]
    DatasetMismatch(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Input-validation failures (exit code 1) as opposed to runtime failures (exit code 2).
    pub fn is_validation(&self) -> bool {
        if let Error::Stage { source, .. } = self {
            return source.is_validation();
        }
        matches!(
            self,
            Error::Schema { .. }
                | Error::Geometry { .. }
                | Error::Validation(_)
                | Error::SplitRequired { .. }
                | Error::DatasetMismatch(_)
                | Error::Json { .. }
                | Error::Csv { .. }
        )
    }

    pub(crate) fn at_stage(self, stage: &'static str, entity: impl Into<String>) -> Self {
        Error::Stage {
            stage,
            entity: entity.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
