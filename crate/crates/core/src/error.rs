//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Heat-kernel evaluation requested below the time floor the truncation
    /// level was certified for.
    #[error("heat kernel evaluated at t = {t} below the certified floor t_min = {t_min}")]
    TruncationUnsound { t: f64, t_min: f64 },

    /// Complexified evaluation point left the working domain of the
    /// evaluator (Gaussian decay no longer dominates character growth).
    #[error("evaluation point has |Im z| = {im_z} outside the certified bound {im_z_max}")]
    DomainExceeded { im_z: f64, im_z_max: f64 },

    /// Mismatched discretizations or algebra dimensions.
    #[error("size mismatch: {left} vs {right} ({context})")]
    SizeMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    #[error("slice index {index} out of range 0..={max}")]
    IndexRange { index: usize, max: usize },

    /// Per-step rejection sampling exceeded the retry budget.
    #[error("bridge rejection exceeded {tries} tries at step {step}")]
    RejectionPathological { tries: u64, step: usize },

    /// Monte-Carlo budget too small for the requested tolerance; the
    /// estimate and its standard error are reported instead of silently
    /// returning a value that does not meet the tolerance.
    #[error("quadrature/MC budget too small: standard error {se:.3e} exceeds tolerance {tol:.3e}")]
    BudgetTooSmall { se: f64, tol: f64 },

    /// A Monte-Carlo sample produced a non-finite value (exponent overflow).
    #[error("non-finite sample value: max log-magnitude {max_log_re:.3e} over {count} offending samples")]
    NonFiniteSample { max_log_re: f64, count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
