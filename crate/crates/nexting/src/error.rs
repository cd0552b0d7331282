use thiserror::Error;

/// Errors surfaced by the prediction engine.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid static configuration (tiling specs, prediction specs, run setup).
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid runtime input (out-of-range channel value, misaligned series, ...).
    #[error("input error: {0}")]
    Input(String),

    /// Malformed line in a config, spec, or log file.
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// A learner produced a non-finite value. Carries the offending prediction id
    /// so one divergent learner out of thousands can be pinpointed.
    #[error("numeric error in prediction {id}: {message}")]
    Numeric { id: usize, message: String },

    /// The offline normal-equations solve could not be completed.
    #[error("numeric error: {0}")]
    Solve(String),

    /// Run manifests disagree on an input identity (log, tiling config, spec file).
    #[error("manifest mismatch: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
