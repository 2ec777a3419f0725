use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("ground mismatch: {0}")]
    GroundMismatch(String),

    #[error("capacity exceeded: {what} is {actual}, limit is {limit}")]
    Capacity {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("incomplete assignment: edge {0} outside the kept set has no value")]
    IncompleteAssignment(usize),

    #[error("point {x} is not on the lattice {b} + {h}Z")]
    OffLattice { x: f64, b: f64, h: f64 },

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("quadrature did not converge: last change {delta:e} with {points} points")]
    Quadrature { delta: f64, points: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
