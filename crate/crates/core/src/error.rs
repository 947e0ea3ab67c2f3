use thiserror::Error;

use crate::quadrature::IntegralResult;

/// Everything that can go wrong while building objects or evaluating a check.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the interval or box where the object is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Construction data that does not describe a valid object.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A hypothesis of the check is not met by the instance.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Adaptive quadrature ran out of depth before reaching its tolerance.
    #[error("quadrature did not converge ({context}): best estimate {} +/- {:.1e}", best.value, best.error_estimate)]
    Convergence {
        context: String,
        best: IntegralResult,
    },

    #[error("unsupported dimension {0} (supported: 2..=4)")]
    UnsupportedDimension(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Prefix the context of a convergence error; other variants pass through.
    pub fn with_context(self, what: &str) -> Self {
        match self {
            Error::Convergence { context, best } => Error::Convergence {
                context: format!("{what}: {context}"),
                best,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
