use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("point ({x}, {y}) is outside the velocity field coverage")]
    Coverage { x: f64, y: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    /// Dense factorization failed or produced an unusable solution.
    #[error("ill-conditioned system ({what}): condition indicator {indicator:.3e}")]
    Conditioning { what: String, indicator: f64 },

    #[error("numerical instability at step {step}: max |lambda| = {max_magnitude:.3e}")]
    Instability { step: usize, max_magnitude: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Instability { .. } => 3,
            Error::Io { .. } => 4,
            Error::Conditioning { .. } => 3,
            Error::Domain(_) | Error::Coverage { .. } | Error::Config(_) | Error::Parse { .. } => 2,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Coverage { .. } => "coverage",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Conditioning { .. } => "conditioning",
            Error::Instability { .. } => "instability",
            Error::Io { .. } => "io",
        }
    }
}
