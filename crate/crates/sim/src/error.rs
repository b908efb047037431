use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Signal(#[from] semofdm::Error),
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error("cannot parse config {path}: {source}")]
    Config {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Csv { path: PathBuf, line: usize, msg: String },
    #[error("unknown figure id {0:?}")]
    UnknownFigure(String),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl SimError {
    /// Short stable tag for the machine-readable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            SimError::Signal(_) => "signal",
            SimError::Spec(_) => "spec",
            SimError::Config { .. } => "config",
            SimError::Io { .. } => "io",
            SimError::Csv { .. } => "csv",
            SimError::UnknownFigure(_) => "figure",
            SimError::Pool(_) => "pool",
        }
    }
}
