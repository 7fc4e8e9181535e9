use thiserror::Error;

/// Errors raised by grid construction, function evaluation, residual sweeps and certifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid resolution {resolution}: {reason}")]
    InvalidResolution { resolution: usize, reason: String },

    #[error("{what} is outside its domain at {point:?}")]
    Domain { what: String, point: Vec<f64> },

    #[error("non-finite value from {what} at {point:?}")]
    NonFinite { what: String, point: Vec<f64> },

    #[error("invalid probability distribution {values:?}: {reason}")]
    InvalidDistribution { values: Vec<f64>, reason: String },

    #[error("unsupported parameter {parameter}: {reason}")]
    Unsupported { parameter: String, reason: String },

    #[error("wrong certifier for regime {regime}: {hint}")]
    Dispatch { regime: String, hint: String },

    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("budget exceeded: {what} needs {requested} evaluations, cap is {cap}")]
    Budget {
        what: String,
        requested: u128,
        cap: u128,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(what: impl Into<String>, point: &[f64]) -> Self {
        Error::Domain {
            what: what.into(),
            point: point.to_vec(),
        }
    }

    pub(crate) fn unsupported(parameter: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Unsupported {
            parameter: parameter.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
