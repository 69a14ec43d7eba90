use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex index {index} out of range for n={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("expected {expected} qubits, got {got}")]
    QubitCount { expected: usize, got: usize },

    #[error("qubit label sets overlap")]
    OverlappingLabels,

    #[error("unknown qubit label {0}")]
    UnknownLabel(usize),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state norm deviates from 1 by {0:.3e}")]
    Unnormalized(f64),

    #[error("{what} cap exceeded: limit {limit}, requested {got}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("graph not supported here: {0}")]
    UnsupportedGraph(String),

    #[error("catalog label '{0}' has no pure representative")]
    NoPureRepresentative(char),

    #[error("unknown catalog label '{0}' (valid: a, b, g, h, i, j)")]
    UnknownCatalogLabel(char),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Malformed(String),
}
