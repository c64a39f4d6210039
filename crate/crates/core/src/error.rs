use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is empty")]
    EmptyGraph,

    #[error("k-core empty (k = {k})")]
    EmptyCore { k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("unknown node label {0:?}")]
    UnknownLabel(String),

    #[error("unflushed ledger: V-side residues must be zero before forward pushes")]
    UnflushedLedger,

    #[error("index metadata does not match graph (expected fingerprint {expected}, got {actual})")]
    FingerprintMismatch { expected: String, actual: String },

    #[error("dense oracle limited to {cap} U-nodes, graph has {actual}")]
    OracleCapExceeded { cap: usize, actual: usize },

    #[error("node {node} has degree {degree} < 2; run the k-core filter before splitting")]
    SplitInfeasible { node: String, degree: usize },

    #[error("timed out after {0:?}")]
    Timeout(std::time::Duration),

    #[error("bad cache file {path}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the input data rather than by how the tool was invoked.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_) | Error::UnknownLabel(_) | Error::Timeout(_))
    }
}
