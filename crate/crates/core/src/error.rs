use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index set of dimension {dim} and bound {bound} is too large to address")]
    SetTooLarge { dim: usize, bound: usize },

    #[error("multi-index {0:?} is not a member of the set")]
    NotInSet(Vec<u32>),

    #[error("index set is not downward closed: {index:?} is present but {missing:?} is not")]
    NotDownwardClosed { index: Vec<u32>, missing: Vec<u32> },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("set mismatch: {0}")]
    SetMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Newton iteration for Gauss-Hermite node {node} of order {order} did not converge")]
    QuadratureNoConvergence { order: usize, node: usize },

    #[error("quadrature rule of order {got} does not match the required order {expected}")]
    RuleOrderMismatch { expected: usize, got: usize },

    #[error("point {0:?} lies outside the interpolation cube")]
    OutsideDomain(Vec<f64>),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("dense assembly of {rows} rows exceeds the cap of {cap} rows")]
    DenseCapExceeded { rows: usize, cap: usize },

    #[error("tridiagonal eigensolver did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
