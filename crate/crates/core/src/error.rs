use thiserror::Error;

/// Contract violations raised by the public operations of this crate.
///
/// Undefined phases are not errors; they are carried as data in
/// [`PhaseValue`](crate::phase::PhaseValue).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsrError {
    #[error("rotation axis must be a unit vector (|n| = {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("direction ({x}, {y}) is not aligned with a square-ring edge")]
    NonAxisDirection { x: f64, y: f64 },

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("position coordinate {coord} outside [0, {eta}]")]
    InvalidPosition { coord: f64, eta: f64 },

    #[error("probability weight p0 = {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("delta = {delta} exceeds eta = {eta}")]
    DeltaExceedsEta { delta: f64, eta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QsrError>;
