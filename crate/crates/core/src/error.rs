use thiserror::Error;

/// Errors produced by the library and surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector/matrix shapes disagree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input violates a structural invariant (non-Hermitian Gram matrix, bad prior, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A bound or asymptotic formula was evaluated outside its validity regime.
    #[error("regime violation: {0}")]
    Regime(String),

    /// An iterative method hit its iteration cap. `best` is the last iterate and its value.
    #[error("{method} did not converge after {iterations} iterations (best value {value})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        value: f64,
        best: Vec<f64>,
    },

    /// Exhaustive enumeration would exceed the configured budget.
    #[error("enumeration too large: {0}")]
    Feasibility(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        Error::Regime(msg.into())
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 2: usage / malformed input, 3: regime or precondition, 4: numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension(_) | Error::Invalid(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Domain(_) | Error::Regime(_) | Error::Feasibility(_) => 3,
            Error::NonConvergence { .. } => 4,
        }
    }
}
