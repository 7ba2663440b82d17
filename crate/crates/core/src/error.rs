use thiserror::Error;

/// Errors raised while validating operators or evaluating identities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("not Hermitian: relative asymmetry {0:e} exceeds tolerance")]
    NotHermitian(f64),

    #[error("not positive semidefinite: eigenvalue {0:e} below -tol_psd")]
    NotPositive(f64),

    #[error("trace {0} is not 1 within tolerance")]
    BadTrace(f64),

    #[error("not a projector: idempotence defect {0:e}")]
    NotIdempotent(f64),

    #[error("eigensolver failed to converge")]
    SolverFailure,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("projectors {0} and {1} are not orthogonal (overlap {2:e})")]
    NotOrthogonal(usize, usize, f64),

    #[error("vectors are not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),

    #[error("pinched state lost mass: trace {0}")]
    MassLoss(f64),

    #[error("state has mass {0:e} outside the given blocks")]
    LeakedSupport(f64),

    #[error("state is not block diagonal in the given blocks (off-block norm {0:e})")]
    NotBlockDiagonal(f64),

    #[error("invalid probability vector: {0}")]
    BadProbability(String),

    #[error("observable is invalid: {0}")]
    BadObservable(String),

    #[error("fine projector {0} straddles coarse blocks")]
    NotARefinement(usize),

    #[error("support of rho is not contained in support of sigma (leakage {0:e})")]
    SupportViolation(f64),

    #[error("eigenbasis does not diagonalize sigma (off-diagonal norm {0:e})")]
    NotEigenbasis(f64),

    #[error("bad generator spec: {0}")]
    BadSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
