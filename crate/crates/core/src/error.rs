use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error at {location}: {message}")]
    Validation { location: String, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A search or enumeration would exceed a configured limit. Callers are
    /// expected to surface this instead of sampling.
    #[error("cap exceeded: {what} requires {required}, limit is {limit}")]
    CapExceeded {
        what: String,
        required: u128,
        limit: u128,
    },

    #[error("{0}")]
    Unsolved(String),
}

impl Error {
    pub fn validation(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn cap(what: impl Into<String>, required: u128, limit: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            required,
            limit,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
