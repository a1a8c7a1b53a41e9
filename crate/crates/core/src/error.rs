use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {subdivisions} subdivisions")]
    Quadrature {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("integrand returned a non-finite value at x = {at:e}")]
    NonFinite { at: f64 },

    /// A formula was called outside the parameter range it is valid for.
    #[error("precondition violated in {function}: {detail}")]
    Precondition {
        function: &'static str,
        detail: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A probability left [0, 1] by more than the rounding slack.
    #[error("{function} produced probability {value:e}, outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { function: &'static str, value: f64 },

    #[error("empty trial plan")]
    EmptyPlan,
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn precondition(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            function,
            detail: detail.into(),
        }
    }
}
