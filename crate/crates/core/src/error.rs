use thiserror::Error;

/// Errors raised by construction, validation and decision routines.
///
/// Residual-carrying variants report the offending residual as `f64`
/// regardless of the scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not symmetric, so the map is not an involution (residual {0:e})")]
    NotInvolutive(f64),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigensolver failed to converge")]
    EigensolverFailure,

    #[error("rank determination unstable: singular value {sigma:e} within the band around threshold {threshold:e}")]
    RankDeterminationUnstable { sigma: f64, threshold: f64 },

    #[error("operator is not algebraic of degree two (fit residual {0:e})")]
    NotDegreeTwo(f64),

    #[error("value lists have different lengths")]
    LengthMismatch,

    #[error("repeated eigenvalue at indices {0} and {1}")]
    RepeatedEigenvalue(usize, usize),

    #[error("vector coordinate {0} vanishes; the vector is not cyclic")]
    ZeroCoordinate(usize),

    #[error("operator is not a contraction (norm {0})")]
    NotContraction(f64),

    #[error("defect ranks are ({defect}, {codefect}), expected (1, 1)")]
    DefectRankNotOne { defect: usize, codefect: usize },

    #[error("lambda must lie in the open unit disk (|lambda| = {0})")]
    InvalidLambda(f64),

    #[error("canonical alpha is undefined because phi(lambda) = 0")]
    CanonicalAlphaUndefined,

    #[error("quadrature too coarse: basis Gram deviates from identity by {0:e}")]
    QuadratureTooCoarse(f64),

    #[error("invalid n: {0}")]
    InvalidN(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
