use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list is empty")]
    EmptyInput,

    #[error("no edges survive simplification (all pairs were self-loops)")]
    NoEdges,

    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("invalid alpha {0}: must be finite and non-negative")]
    InvalidAlpha(f64),

    #[error("alpha {0} has no exact representation in this scalar type")]
    InexactAlpha(f64),

    #[error("budget {budget} exceeds the {node_count} nodes of the graph")]
    BudgetTooLarge { budget: usize, node_count: usize },

    #[error("budget must be at least 1")]
    ZeroBudget,

    #[error("graph has {node_count} nodes, above the dense oracle cap of {cap}")]
    GraphTooLarge { node_count: usize, cap: usize },

    #[error("{0} has no node-level transition matrix")]
    UnsupportedKind(&'static str),

    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("cannot estimate from an empty sample")]
    EmptySample,

    #[error("{weights} weights supplied for a sample of {entries} entries")]
    WeightMismatch { weights: usize, entries: usize },

    #[error("relative error is undefined for a zero true value")]
    ZeroTruth,

    #[error("config not found: {0}")]
    ConfigNotFound(PathBuf),

    #[error("config: {0}")]
    Config(String),

    #[error("dataset not found: {0}")]
    DatasetNotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
