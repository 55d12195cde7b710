//! Crate-wide error type.

/// Errors produced by the model, the fitting pipeline and track I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A physical or model parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The pressure (or temperature) curvature coefficient must be positive.
    #[error("curvature coefficient must be positive, got {0:e}")]
    NonPositiveCurvature(f64),

    /// The reduced system has no equilibrium with positive curvature.
    #[error("no equilibrium with positive curvature exists for the given constants")]
    NoEquilibrium,

    /// A trajectory frequency pair is resonant or degenerate.
    #[error("degenerate frequency: {0}")]
    DegenerateFrequency(String),

    /// The integration produced a non-finite or guard-violating state.
    #[error("integration blew up; last valid time {last_valid_time} s")]
    Blowup {
        /// Time of the last state that was still finite and admissible.
        last_valid_time: f64,
    },

    /// The three-point fitting window is singular or ill-conditioned.
    #[error("degenerate fitting window: {0}")]
    DegenerateWindow(String),

    /// Forecasting requires an accepted fit.
    #[error("fit was not accepted; cannot forecast")]
    UnacceptedFit,

    /// A track file failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse {
        /// 1-based line number in the input.
        line: usize,
        /// What went wrong.
        msg: String,
    },

    /// A parsed track violates a validity constraint.
    #[error("invalid track at line {line}: {msg}")]
    InvalidTrack {
        /// 1-based line number of the offending row.
        line: usize,
        /// Violated constraint.
        msg: String,
    },

    /// Forecast and reference tracks share no time range.
    #[error("tracks do not overlap in time")]
    NoOverlap,

    /// A tangent-plane point maps outside the valid latitude range.
    #[error("point maps outside the tangent plane: {0}")]
    OutOfPlane(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
