use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// The variants are grouped so the CLI can map them onto exit codes:
/// configuration problems, feasibility-guard violations and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("feasibility guard: {0}")]
    Feasibility(String),

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn guard(msg: impl Into<String>) -> Self {
        Error::Feasibility(msg.into())
    }

    /// True for errors caused by a bad configuration or input value.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::Parse(_)
                | Error::Degenerate(_)
                | Error::Unsupported(_)
                | Error::Json(_)
        )
    }

    pub fn is_feasibility(&self) -> bool {
        matches!(self, Error::Feasibility(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
