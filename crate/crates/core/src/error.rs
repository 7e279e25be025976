use thiserror::Error;

/// Errors raised by the magnon toolkit.
///
/// The variants are coarse categories; the CLI maps each one to a distinct
/// exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is well formed but too large for the configured budget.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Every amplitude of the requested magnon state interferes away.
    #[error("null state: sum of |f|^2 is {norm_sq:e} (completely destructive interference)")]
    NullState { norm_sq: f64 },

    /// A computed object failed its own consistency checks.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    /// A thermodynamic quantity diverges at the boundary of its domain.
    #[error("divergence: value tends to {}infinity", if *.positive { "+" } else { "-" })]
    Divergence { positive: bool },
}

impl Error {
    /// Short, stable category string.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Infeasible(_) => "infeasible",
            Error::NullState { .. } => "null-state",
            Error::InternalConsistency(_) => "internal-consistency",
            Error::Divergence { .. } => "divergence",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::InternalConsistency(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
