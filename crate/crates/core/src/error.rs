use thiserror::Error;

/// Errors produced by the distribution, fitting and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LtllError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sign change in bracket [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("function is not finite at ({0}, {1})")]
    Evaluation(f64, f64),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("matrix is not positive definite (a11 = {a11}, a12 = {a12}, a22 = {a22})")]
    NotPositiveDefinite { a11: f64, a12: f64, a22: f64 },
    #[error("not available: {0}")]
    NotAvailable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, LtllError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LtllError::Domain(msg.into()))
}
