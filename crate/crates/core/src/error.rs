use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid particle position: {0}")]
    InvalidPosition(String),

    #[error("qubit index {index} out of range for {n_qubits} qubit(s)")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("unsupported qubit count {0} (expected 1..=24)")]
    UnsupportedQubitCount(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("feature {index} = {value} lies outside [0, pi]; was the data scaled?")]
    FeatureOutOfRange { index: usize, value: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("pca: {0}")]
    Pca(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("fitness evaluation failed for particle {particle} at iteration {iteration}: {source}")]
    Fitness {
        particle: usize,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
