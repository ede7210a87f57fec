use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    #[error("invalid instance:\n{0}")]
    Invalid(ValidationReport),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("region is not part of the instance")]
    UnknownRegion,

    #[error("hospital set must be non-empty")]
    EmptyHospitalSet,

    #[error("assignment is not a matching: {0}")]
    NotAMatching(String),

    #[error("matching violates the cap of region {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} is {value}, above the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: impl Into<Option<usize>>, message: impl Into<String>) -> Self {
        Error::Parse {
            line: line.into(),
            message: message.into(),
        }
    }

    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }
}
