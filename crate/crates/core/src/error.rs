use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant onto an exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZeckError {
    /// A caller-supplied argument is out of its documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A coefficient vector violates the Zeckendorf legality rule.
    #[error("illegal code: {0}")]
    Validation(String),

    /// The structural precondition of an interval operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The request is valid but exceeds a desk-scale budget.
    #[error("capability exceeded: {what} (limit {limit})")]
    Capability { what: String, limit: String },

    /// A distribution with a single support point cannot be standardized.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    /// An internal consistency check failed.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, ZeckError>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(ZeckError::Argument(msg.into()))
}
