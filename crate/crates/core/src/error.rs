use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("constant symbol excluded")]
    ConstantSymbol,

    #[error("ambiguous at jump: angle {0} is a jump point, request a side")]
    AmbiguousAtJump(f64),

    #[error("angle {0} is a jump point or piece boundary")]
    AtJump(f64),

    #[error("exceptional level: {lambda} lies within {distance:e} of the exceptional value {nearest}")]
    ExceptionalLevel {
        lambda: f64,
        nearest: f64,
        distance: f64,
    },

    #[error("level {0} is outside the open essential range")]
    OutsideRange(f64),

    #[error("inadmissible interval ({0}, {1})")]
    InadmissibleInterval(f64, f64),

    #[error("counting inconsistency: {0}")]
    CountingInconsistency(String),

    #[error("quadrature did not converge (achieved {achieved:e}, requested {requested:e})")]
    QuadratureFailure { achieved: f64, requested: f64 },

    #[error("requires lambda below the essential infimum {gamma1}, got {lambda}")]
    RequiresBelowInfimum { lambda: f64, gamma1: f64 },

    #[error("spectral parameter {0} is on the cut")]
    OnCut(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("merged singularities: endpoints {0} and {1} are closer than 1e-8")]
    MergedSingularities(usize, usize),

    #[error("branch index {index} out of range (multiplicity {m})")]
    BranchOutOfRange { index: usize, m: usize },

    #[error("boundary value undefined here: {0}")]
    BoundaryUndefined(String),

    #[error("form mismatch: discrepancy {0:e}")]
    FormMismatch(f64),

    #[error("point {0} is not in the required region")]
    BadPoint(String),

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
