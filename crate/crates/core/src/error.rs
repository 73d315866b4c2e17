use thiserror::Error;

use crate::graph::Edge;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge ({}, {}) is not in the graph", .0.0, .0.1)]
    MissingEdge(Edge),
    #[error("invalid edge ({0}, {1}) for a graph on {2} vertices")]
    InvalidEdge(usize, usize, usize),
    #[error("pair ({}, {}) is already an edge", .0.0, .0.1)]
    NotANonEdge(Edge),
    #[error("size cap exceeded: {0}")]
    SizeCapExceeded(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("invalid length {length} on edge ({}, {})", .edge.0, .edge.1)]
    InvalidLength { edge: Edge, length: f64 },
    #[error("missing length for edge ({}, {})", .0.0, .0.1)]
    MissingLength(Edge),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("framework is not well-positioned at edge ({}, {})", .0.0, .0.1)]
    NotWellPositioned(Edge),
    #[error("framework graph does not match linkage graph")]
    GraphMismatch,
    #[error("vertices {0} and {1} are not connected")]
    Disconnected(usize, usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
