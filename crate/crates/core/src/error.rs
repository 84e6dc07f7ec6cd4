//! Crate-wide error type. Constructors validate, operations assume valid.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("|beta| must be below 1, got {0}")]
    BetaOutOfRange(f64),

    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    #[error(
        "working_frame_beta {working} is not the negation of detector_beta {detector}; \
         the working frame moves at +beta in the detector frame exactly when the \
         detector moves at -beta in the working frame"
    )]
    FrameMismatch { working: f64, detector: f64 },

    #[error("at most two measurements are supported, got {0}")]
    TooManyMeasurements(usize),

    #[error("bounds are degenerate: {0}")]
    DegenerateBounds(&'static str),

    #[error("grid resolution must be at least 1 cell per axis")]
    ZeroResolution,

    #[error("projection has zero overlap with the state")]
    OrthogonalProjection,

    #[error("polarization state is not normalized: sum of |c|^2 is {0}")]
    NotNormalized(f64),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error(
        "pump frequency {omega_p} must be at least ten times sigma_sum + sigma_diff = {bound} \
         so the positive-frequency truncation is negligible"
    )]
    PumpTooNarrow { omega_p: f64, bound: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),

    #[error("a simulation needs at least one event")]
    EmptySimulation,
}
