use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the function (a pole, a branch cut, x = 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter violates a type invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The integrand or a model quantity produced NaN or an infinity.
    #[error("non-finite value {value} at {at}")]
    NonFinite { at: f64, value: f64 },

    /// An iterative method stopped before reaching the requested tolerance.
    #[error("{what}: achieved {achieved:e}, requested {requested:e}")]
    Accuracy {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },

    /// The operation does not apply to this model regime (e.g. pure-jump vs mixed).
    #[error("regime error: {0}")]
    Regime(String),

    /// A market quote admits no spot volatility under the given parameters.
    #[error("infeasible quote: {0}")]
    InfeasibleQuote(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::Accuracy { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
