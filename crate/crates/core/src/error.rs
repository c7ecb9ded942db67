use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex-set width {set} does not match graph vertex count {graph}")]
    WidthMismatch { set: usize, graph: usize },

    #[error("state is not an independent set of the graph")]
    NotIndependent,

    #[error("{what} requires {what_limit} <= {limit}, got {value}")]
    OverLimit {
        what: &'static str,
        what_limit: &'static str,
        limit: usize,
        value: usize,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error(
        "mixture precondition violated: separation distance exceeds epsilon \
         (witness outcome {witness}: alpha={alpha} < (1-eps)*beta={floor})"
    )]
    MixturePrecondition {
        witness: String,
        alpha: f64,
        floor: f64,
    },

    #[error("skeleton has no perfect matching")]
    NoPerfectMatching,

    #[error("rejection sampler exceeded {0} trials without producing a matching")]
    RejectionCap(u64),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("anchored matrix construction failed: {0}")]
    InvalidMatrix(String),

    #[error("empty sample stream")]
    EmptySamples,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
