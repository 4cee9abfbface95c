//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the numerical routines, the oracle and the command-line harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported matrix dimension {0} (only 2 and 4 are supported)")]
    UnsupportedDimension(usize),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "unstable parameters: coupling {coupling} is not below the critical coupling {critical}"
    )]
    Unstable { coupling: f64, critical: f64 },

    #[error("closed-form diagonalizer requires equal couplings (g_bs = {g_bs}, g_sq = {g_sq})")]
    UnequalCouplings { g_bs: f64, g_sq: f64 },

    #[error("unphysical input: {0}")]
    Unphysical(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("Fock cutoff {cutoff} too small: tail weight {tail_weight:e} exceeds {threshold:e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail_weight: f64,
        threshold: f64,
    },

    #[error("Fock cutoff {cutoff} not converged: doubling it changes the result by {change:e} (limit {threshold:e})")]
    CutoffUnconverged {
        cutoff: usize,
        change: f64,
        threshold: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by invalid inputs rather than by a failing computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Unstable { .. }
                | Error::UnequalCouplings { .. }
                | Error::Unphysical(_)
                | Error::Config(_)
                | Error::Json(_)
        )
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
