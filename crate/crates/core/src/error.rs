use thiserror::Error;

/// Errors raised by constructions and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is singular (smallest eigenvalue or pivot {0:e})")]
    Singular(f64),

    #[error("matrix is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("operator is not a projector (idempotence deviation {0:e})")]
    NotProjector(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("unsupported dimension {0}: {1}")]
    UnsupportedDimension(usize, &'static str),

    #[error("no displacement matches the conjugated operator for (a,b)=({0},{1}); not a Clifford unitary")]
    NotClifford(usize, usize),

    #[error("vector is not an eigenvector (residual {0:e})")]
    NotEigenvector(f64),

    #[error("triple product with vanishing magnitude at ({0},{1},{2})")]
    DegenerateTriple(usize, usize, usize),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
