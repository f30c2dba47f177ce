use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An angle or parameter lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact computation was requested on a value that only has a float form.
    #[error("exact arithmetic requires {0}")]
    NotExact(String),

    /// An exactly computed quantity is irrational and cannot enter a rational payoff.
    #[error("value is not rational: {0}")]
    NotRational(String),

    #[error("invalid parameters for class {class}: {violated}")]
    InvalidClassParams { class: String, violated: String },

    #[error("class {0} has a continuous parameter family, not a discrete solution set")]
    NotDiscrete(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
