use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point lies outside the open domain")]
    OutsideDomain,
    #[error("point is not on the boundary (off by {0:e})")]
    NotOnBoundary(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exhaustion level {level} out of range 1..={levels}")]
    LevelOutOfRange { level: usize, levels: usize },
    #[error("samples belong to different discretizations")]
    DiscretizationMismatch,
    #[error("more than one node evaluates to -inf ({0} nodes)")]
    PoleBudgetExceeded(usize),
    #[error("certification failed at level {level}: {reason}")]
    CertificationFailed { level: usize, reason: String },
    #[error("no Cauchy subsequence at tolerance {tol:e}")]
    Inconclusive { tol: f64 },
    #[error("sequence is divergent at tolerance {tol:e}")]
    Divergent { tol: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
