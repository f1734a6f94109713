use thiserror::Error;

/// Errors surfaced by the clamp engine and the landscape search.
///
/// Contract violations that indicate a programming error (e.g. evaluating an
/// ansatz at positive time) panic instead; see the individual operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("relative truncation tolerance must lie in (0, 1), got {0}")]
    InvalidTruncationTol(f64),

    #[error("state shape mismatch: model expects {expected}, got {got}")]
    StateShape {
        expected: &'static str,
        got: &'static str,
    },

    #[error("non-finite state at step {step} (t = {time})")]
    NonFiniteState { step: usize, time: f64 },

    #[error("non-finite result in {context}")]
    NonFinite { context: &'static str },

    #[error("rate grid must contain at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("rate grid must be positive and strictly increasing")]
    InvalidRateGrid,

    #[error("amplitude grid must be nonnegative and strictly increasing")]
    InvalidAmplitudeGrid,

    #[error("target voltage {0} lies outside the analyzed branch (v >= 0)")]
    TargetOutsideBranch(f64),

    #[error("error sequence is not monotonically decreasing under step halving: {0:?}")]
    NonMonotoneConvergence(Vec<f64>),

    #[error("observed convergence order {order:.3} below the trapezoid-limited floor")]
    ConvergenceTooSlow { order: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
