use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no edges")]
    EmptyGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for {len} samples")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("sample {0} is already labeled")]
    DuplicateLabel(usize),

    #[error("sample {0} has no ground-truth label")]
    MissingGroundTruth(usize),

    #[error("degenerate training set: {0}")]
    DegenerateModel(String),

    #[error("iteration did not converge after {iterations} steps (last change {change:e})")]
    NonConvergence { iterations: usize, change: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("labels must cover the pending batch {expected:?}, got {got:?}")]
    BatchMismatch { expected: Vec<usize>, got: Vec<usize> },

    #[error("no session {0}")]
    UnknownSession(String),

    #[error("session is {0}")]
    InvalidState(String),

    #[error("malformed document: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn graph(msg: impl Into<String>) -> Self {
        Error::InvalidGraph(msg.into())
    }
}
