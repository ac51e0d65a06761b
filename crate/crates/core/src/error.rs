use thiserror::Error;

/// Errors raised by the library.
///
/// The variants are grouped so that callers (the CLI in particular) can map
/// them onto configuration, numerical and IO failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument outside supported domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("eigendecomposition did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("root bracket failure: F(lo)={f_lo}, F(hi)={f_hi}, target {target}")]
    Bracket { f_lo: f64, f_hi: f64, target: f64 },

    #[error("root finder stalled after {iterations} iterations (|F(x)-u| = {residual:e})")]
    RootNotFound { iterations: usize, residual: f64 },

    #[error("fewer than {k} nonzero eigenvalues; cannot select a set of that size")]
    InsufficientRank { k: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("negative density {value:e} at {location:?}")]
    NegativeDensity { value: f64, location: Vec<f64> },

    #[error("zero-variance chain; autocorrelation undefined")]
    ZeroVariance,

    #[error("empty input: {0}")]
    Empty(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's configuration rather than by
    /// arithmetic breaking down.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::Domain(_)
                | Error::InvalidParameter(_)
                | Error::Unsupported(_)
                | Error::Empty(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
