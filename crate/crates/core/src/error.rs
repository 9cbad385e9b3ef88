use thiserror::Error;

/// Errors raised by the estimation, oracle and simulation engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("out of regime: x/t = {x_t} must lie strictly between b = {b} and mu = {mu}")]
    OutOfRegime { x_t: f64, b: f64, mu: f64 },

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("branch error: {0}")]
    Branch(String),

    #[error("hypothesis (H) check failed for {0}")]
    HypothesisHFailed(String),

    #[error("model has zero drift; potential density and creeping quantities need b > 0")]
    ZeroDrift,

    #[error("step cap exceeded on {discarded} of {n} paths")]
    StepCapExceeded { discarded: u64, n: u64 },

    #[error("parse error at position {pos}: expected {expected}")]
    Parse { pos: usize, expected: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for this error class: 2 for domain and parse
    /// problems, 3 for numerical convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConvergenceFailure(_) | Error::StepCapExceeded { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
