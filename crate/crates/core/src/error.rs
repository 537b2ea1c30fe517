use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the function (poles, branch cuts, singular points).
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Linear system or design matrix too ill-conditioned to trust.
    #[error("ill-conditioned {context}: condition estimate {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned {
        context: String,
        condition: f64,
        limit: f64,
    },

    /// A factorisation or iteration failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
