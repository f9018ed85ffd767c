use thiserror::Error;

/// Errors raised by the coefficient, moment, saddle and quadrature layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid factor family: {0}")]
    InvalidFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation index would exceed cap {cap} at r = {r:e}")]
    TruncationCap { r: f64, cap: u64 },

    #[error("saddle bracket failure for n = {n}: {reason}")]
    BracketFailure { n: u64, reason: String },

    #[error("mean is not decreasing in r on the bracket for n = {n} (r = {r_a:e} vs r = {r_b:e})")]
    NotMonotone { n: u64, r_a: f64, r_b: f64 },

    #[error("quadrature did not converge within depth cap (partial = {partial:e}, error estimate = {error_estimate:e})")]
    QuadratureNotConverged { partial: f64, error_estimate: f64 },

    #[error("brute-force enumeration refused for n = {0} (limit 60)")]
    EnumerationGuard(u64),

    #[error("{0}")]
    Unsupported(String),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-parsable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidFamily(_) => "invalid_family",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::TruncationCap { .. } => "truncation_cap",
            Error::BracketFailure { .. } => "bracket_failure",
            Error::NotMonotone { .. } => "not_monotone",
            Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
            Error::EnumerationGuard(_) => "enumeration_guard",
            Error::Unsupported(_) => "unsupported",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
