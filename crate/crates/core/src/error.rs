use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("{what}: size {size} exceeds the configured cap of {cap}")]
    Capacity { what: &'static str, size: u128, cap: u128 },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("occupation total mismatch: {left} vs {right} photons")]
    TotalMismatch { left: u32, right: u32 },

    #[error("length mismatch: {left} vs {right} modes")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid occupation list: {0}")]
    InvalidOccupation(String),

    #[error("matrix is not unitary: max |UU^dagger - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error(
        "sampler starved: collected {collected} of {requested} distinct samples after {draws} raw draws"
    )]
    Starvation { requested: usize, collected: usize, draws: u64 },

    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),

    #[error("underdetermined fit: {points} points for {coefficients} coefficients")]
    Underdetermined { points: usize, coefficients: usize },

    #[error("empty graph")]
    EmptyGraph,

    #[error("fingerprint metadata mismatch: {0}")]
    MetadataMismatch(String),

    #[error("no candidate radius separates any sampler pair above {threshold}")]
    NoSeparation { threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, message: message.into() }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }
}
