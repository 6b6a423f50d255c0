use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read corpus root {path}: {source}")]
    UnreadableRoot {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record in {path} line {line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("no grammar available for {0}")]
    GrammarUnavailable(String),

    #[error("parse failure: {0}")]
    Parse(String),

    #[error("missing scores for samples: {}", .0.join(", "))]
    MissingScores(Vec<String>),

    #[error("AUC needs both positive and negative labels")]
    SingleClass,

    #[error("sidecar error: {0}")]
    Sidecar(String),

    #[error("data quality failure: {0}")]
    DataQuality(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::GrammarUnavailable(_) => 2,
            Error::DataQuality(_) => 4,
            Error::Stage { source, .. } => match source.as_ref() {
                Error::Config(_) => 2,
                Error::DataQuality(_) => 4,
                _ => 3,
            },
            _ => 3,
        }
    }
}
