use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("{what} did not converge (estimate {value:e} +/- {abs_error:e})")]
    NotConverged {
        what: String,
        value: f64,
        abs_error: f64,
    },

    #[error("no sign change of the objective on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
