use std::path::PathBuf;

use thiserror::Error;

/// Failure to parse an Iconclass notation.
///
/// `offset` is the byte offset of the first offending character in the
/// string that was handed to the parser (before any trimming).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed notation at byte {offset}: {reason}")]
pub struct MalformedNotation {
    pub offset: usize,
    pub reason: &'static str,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Notation(#[from] MalformedNotation),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{location}: {message}")]
    SchemaViolation { location: String, message: String },

    #[error("no code of image {0:?} resolves to a textual correlate")]
    NoResolvableCodes(String),

    #[error("cannot carve {requested} held-out records from {available}")]
    InsufficientRecords { requested: usize, available: usize },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("candidate {0:?} has no reference")]
    MissingReference(String),

    #[error("duplicate image id {0:?}")]
    DuplicateId(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaViolation {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
