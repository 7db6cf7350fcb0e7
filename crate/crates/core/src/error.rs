//! Error type shared by loading, sampling, training and evaluation.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("edge list contains no usable edges")]
    EmptyGraph,

    #[error("{0}")]
    InvalidConfig(String),

    #[error("{what} is not defined for {why}")]
    NotApplicable {
        what: &'static str,
        why: &'static str,
    },

    /// Directed walks cannot leave a node with no outgoing edge.
    #[error("node {node} has no outgoing edge; directed walks cannot proceed")]
    DanglingNode { node: String },

    #[error("{what}: size {actual} exceeds supported limit {limit}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    /// The geometric proximity series does not converge for this damping.
    #[error("series diverges: beta {beta} * spectral radius {spectral_radius:.6} >= 1")]
    Divergent { beta: f64, spectral_radius: f64 },

    #[error("iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("non-finite value during training at step {step} (learning rate {lr:.6e})")]
    NonFinite { step: u64, lr: f64 },

    #[error("embedding set carries no context vectors; source-context scoring needs both sides")]
    NoContextVectors,

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
