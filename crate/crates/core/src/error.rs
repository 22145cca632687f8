use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cancellation budget exceeded: need ~{required_digits} working digits, have {available_digits}")]
    CancellationBudgetExceeded {
        required_digits: u32,
        available_digits: u32,
    },

    #[error("series needs {required} terms, budget allows {allowed}")]
    TermLimitExceeded { required: usize, allowed: usize },

    #[error("computed value {value:e} is below -{tolerance:e} for a non-positive argument")]
    NegativeResultAnomaly { value: f64, tolerance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ill-conditioned moment matrix (condition number {condition:e})")]
    IllConditionedGram { condition: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside supported envelope: {0}")]
    OutsideEnvelope(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("decode error: {0}")]
    Decode(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    /// True for errors that signal a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::CancellationBudgetExceeded { .. }
                | Error::TermLimitExceeded { .. }
                | Error::NegativeResultAnomaly { .. }
                | Error::IllConditionedGram { .. }
        )
    }
}
