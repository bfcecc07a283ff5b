use thiserror::Error;

use crate::graph::EdgeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("negative or non-finite weight {0}")]
    BadWeight(f64),

    #[error("edge id {got} out of arrival order (expected {expected})")]
    EdgeOrder { expected: usize, got: usize },

    #[error("edge ({0}, {1}) closes a cycle in an instance declared as a tree")]
    NotATree(usize, usize),

    #[error("edge ({0}, {1}) does not share exactly one vertex with the revealed tree")]
    NotGrowing(usize, usize),

    #[error("vertex {vertex} exceeds declared max degree {max}")]
    DegreeExceeded { vertex: usize, max: usize },

    #[error("MCM instance has non-unit weight {0}")]
    NonUnitWeight(f64),

    #[error("invalid switch in matching {matching}: {reason}")]
    InvalidSwitch { matching: usize, reason: String },

    #[error("edge {0:?} conflicts with the matching")]
    Conflict(EdgeId),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("certificate violation: {0}")]
    Certificate(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("input graph is not a forest")]
    Cyclic,

    #[error("instance has {edges} edges, exact oracle cap is {cap}")]
    TooLarge { edges: usize, cap: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
