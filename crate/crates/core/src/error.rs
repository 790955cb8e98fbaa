use alloc::string::String;

/// Errors raised by the curvature, invariant, fuzzing and flow routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("metric is singular or not positive definite")]
    SingularMetric,
    #[error("point {0:?} lies outside the chart domain")]
    OutsideChart([f64; 4]),
    #[error("average scalar curvature required to evaluate G_k")]
    MissingAverageScalar,
    #[error("beta is undefined: integral of sigma_2 is {0} (not positive)")]
    UndefinedBeta(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("flow state is extinct (squared scale {0})")]
    Extinct(f64),
    #[error("unsupported model family: {0}")]
    UnsupportedFamily(String),
}

pub type Result<T> = core::result::Result<T, LabError>;

pub(crate) fn contract(msg: impl Into<String>) -> LabError {
    LabError::Contract(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> LabError {
    LabError::Domain(msg.into())
}
