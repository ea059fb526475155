use thiserror::Error;

/// Errors raised while building spaces, materials or assembling matrices.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid knot vector: {0}")]
    InvalidKnotVector(String),

    #[error("parametric coordinate {0} is outside [0, 1]")]
    OutOfDomain(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: jacobian determinant {0:e} at ({1}, {2})")]
    DegenerateGeometry(f64, f64, f64),

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid layup: {0}")]
    InvalidLayup(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("cannot finalize an empty matrix builder")]
    EmptyBuilder,

    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
