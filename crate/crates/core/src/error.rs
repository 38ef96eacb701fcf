use thiserror::Error;

use crate::scalar::Backend;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty matrix or vector")]
    Empty,

    #[error("expected {expected} entries, got {actual}")]
    WrongLength { expected: usize, actual: usize },

    #[error("entry at row {row}, column {col} is not a finite number")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("backend mismatch: {left} and {right}")]
    BackendMismatch { left: Backend, right: Backend },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    /// `pivot` is 1-based.
    #[error("matrix is singular: pivot {pivot} vanished")]
    Singular { pivot: usize },

    #[error("index set {elems:?} is not strictly increasing within 1..={n}")]
    InvalidIndexSet { elems: Vec<usize>, n: usize },

    #[error("rank {rank} out of range for {j}-subsets of 1..={n}")]
    RankOutOfRange { rank: usize, j: usize, n: usize },

    #[error("compound order {j} out of range 1..={n}")]
    OrderOutOfRange { j: usize, n: usize },

    #[error("tolerance must be non-negative, got {0}")]
    NegativeTolerance(f64),

    #[error("matrix is zero")]
    ZeroMatrix,

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
