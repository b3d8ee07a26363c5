use std::io;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) out of range for {n} vertices")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },

    #[error("self-loop ({v}, {v}) is not allowed")]
    SelfLoop { v: usize },

    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vertex {v} out of range for {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },

    #[error("load {value} at index {index} is negative")]
    NegativeLoad { index: usize, value: f64 },

    #[error("load entries sum to {sum}, expected total {total}")]
    TotalMismatch { sum: f64, total: f64 },

    #[error("total load must be positive, got {0}")]
    NonPositiveTotal(f64),

    #[error("graph has no edges")]
    NoEdge,

    #[error("operation does not apply to graph class `{class}`")]
    WrongClass { class: &'static str },

    #[error("vertex set is not a clique of the graph")]
    InvalidCertificate,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("quadratic form is zero; iterate is a stationary zero")]
    StationaryZero,

    #[error("graph is degenerate (edgeless); nothing to optimize")]
    DegenerateGraph,

    #[error("support is empty after thresholding")]
    EmptySupport,

    #[error("non-finite value in numeric input")]
    NonFinite,

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}
