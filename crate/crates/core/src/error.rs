use thiserror::Error;

/// Failure categories shared by every operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inputs violate a precondition.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A numerical procedure did not reach its tolerance.
    #[error("numerical failure: {message} (residual {residual:.3e})")]
    Numerical { message: String, residual: f64 },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn numerical(msg: impl Into<String>, residual: f64) -> Self {
        Error::Numerical {
            message: msg.into(),
            residual,
        }
    }

    /// True for precondition failures, false for numerical or io trouble.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Invalid(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
