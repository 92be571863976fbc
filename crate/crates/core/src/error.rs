use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("{what} did not converge after {iterations} iterations (last value {last:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last: f64,
    },

    /// A Fourier coefficient was requested for a power that the truncation
    /// has annihilated.
    #[error("coefficient {0} unavailable: T^{0} vanishes at this truncation")]
    Index(usize),

    #[error("zero element: every Fourier coefficient is at or below the threshold {0:e}")]
    ZeroElement(f64),

    #[error("refused: {0}")]
    Refusal(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// True for failures of the computation itself, as opposed to inputs
    /// that were rejected before or during validation.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Numeric(_))
    }
}
