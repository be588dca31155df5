use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid device parameters: {0}")]
    InvalidParams(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("word-line must contain at least one cell")]
    EmptyWordline,

    #[error("level {level} out of range for q = {q}")]
    LevelOutOfRange { level: usize, q: usize },

    #[error("cell {cell}: observation has zero likelihood under every input level")]
    ZeroLikelihood { cell: usize },

    #[error("message normalization underflowed at cell {cell}")]
    Underflow { cell: usize },

    #[error("instance too large for exhaustive enumeration ({configurations} configurations)")]
    InstanceTooLarge { configurations: f64 },

    #[error("invalid quantizer: {0}")]
    InvalidQuantizer(String),

    #[error("fine grid does not cover the output support (tail mass {tail_mass:e})")]
    GridCoverage { tail_mass: f64 },

    #[error("cannot split {bins} fine bins into {regions} regions")]
    InfeasibleRegions { bins: usize, regions: usize },

    #[error("code construction failed: {0}")]
    Construction(String),

    #[error("malformed alist: {0}")]
    Alist(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
