use thiserror::Error;

/// Errors produced by the simulator, feature maps, clustering and training.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("qubit index {index} out of range for {n_qubits}-qubit state")]
    Index { index: usize, n_qubits: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("non-finite objective value at coordinate {coordinate}")]
    Numerical { coordinate: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.kind() {
            csv::ErrorKind::Io(_) => Error::Io(err.to_string()),
            _ => Error::Parse(err.to_string()),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
