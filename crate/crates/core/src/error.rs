use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (k out of range, bad index, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Shapes of the operands do not fit together.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A matrix that must be invertible is singular or too badly conditioned.
    #[error("singular matrix: {0}")]
    Singular(String),
    /// A matrix that must be symmetric positive definite is not.
    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),
    /// An entry is NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),
    /// An iterative method did not reach its tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// A user supplied evaluator failed at a sample point.
    #[error("evaluation failed at {at}: {message}")]
    Evaluation { at: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn dimension(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
