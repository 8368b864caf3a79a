use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The closed-form force diverges on the light cone `a = 1`; points inside
    /// the exclusion window are refused instead of returned as huge numbers.
    #[error("dynamical force unavailable at the light cone: |a - 1| = {distance:e} is inside the exclusion half-width {half_width:e}")]
    LightCone { distance: f64, half_width: f64 },

    /// An iterative or extrapolated evaluation did not reach its tolerance.
    #[error("numerical convergence failure in {what}: residual {residual:e} exceeds {tolerance:e}")]
    Convergence {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    /// Settings that violate a documented validity condition.
    #[error("invalid settings: {0}")]
    Validity(String),

    /// Malformed scenario documents and similar input problems.
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
