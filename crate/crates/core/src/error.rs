use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no primitive factorization of 0")]
    ZeroMultiIndex,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("pole at coordinate {0}")]
    Pole(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exhaustion exhausted: annulus too thin at level {level}")]
    ExhaustionExhausted { level: u32 },

    #[error("quadrature did not converge after {doublings} doublings (last {last}, previous {previous})")]
    NotConverged {
        doublings: u32,
        last: Complex64,
        previous: Complex64,
    },

    #[error("point lies on or outside the contour in coordinate {0}")]
    OutsideContour(usize),

    #[error("contour circle {0} is not centered at the origin")]
    NonCenteredContour(usize),

    #[error("degenerate Δ(k); use coefficient form")]
    DegenerateDelta,

    #[error("series is not supported on positive multiples of the primitive index")]
    NotInSubspace,

    #[error("ill-formed block for k={k:?}: nonzero column {column:?} is not a positive multiple of k")]
    IllFormedBlock { k: Vec<u32>, column: Vec<u32> },

    #[error("term of degree {degree} exceeds truncation {trunc}")]
    TruncationExceeded { degree: u32, trunc: u32 },

    #[error("empty family")]
    EmptyFamily,

    #[error("malformed data: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
