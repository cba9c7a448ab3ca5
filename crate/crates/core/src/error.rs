use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Distribution parameters violate their constraints.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("series `{series}` did not converge within {terms} terms")]
    NonConvergence { series: &'static str, terms: usize },

    /// The unscaled value is not representable; request the scaled form instead.
    #[error("overflow evaluating {0}; use the exponentially scaled form")]
    Overflow(&'static str),

    /// A computed value fell outside its mathematically guaranteed range.
    #[error("invariant violated in {what}: computed {value:e}")]
    Invariant { what: &'static str, value: f64 },

    #[error("quadrature tolerance not met: requested {requested:e}, achieved {achieved:e}")]
    ToleranceNotMet { requested: f64, achieved: f64 },

    #[error("root finding did not converge after {0} iterations")]
    RootNotFound(usize),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }

    /// True for failures of an iterative procedure rather than bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::ToleranceNotMet { .. } | Error::RootNotFound(_)
        )
    }
}
