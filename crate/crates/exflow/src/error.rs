//! Crate-wide error type.

/// Errors reported by the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Structurally invalid input (reversed intervals, NaN coordinates, ...).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A requested perturbation or budget cannot be realized.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// An iterative solve ran out of iterations.
    #[error("no convergence: {0}")]
    NonConvergence(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
