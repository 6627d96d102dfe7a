use std::path::PathBuf;

use crate::model::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid vertex {0}: graph has {1} vertices")]
    InvalidVertex(VertexId, usize),

    #[error("vertex {0} owns no private graph")]
    UndefinedOwner(VertexId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("cosine similarity undefined for zero vectors")]
    ZeroVector,

    #[error("approximation ratio undefined: exact distance 0 but estimate {0}")]
    UnreachableMismatch(u32),

    #[error("model invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("{path}:{line}: {message}")]
    Fixture {
        path: String,
        line: usize,
        message: String,
    },

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("checksum mismatch for {what}: expected {expected}, found {found}")]
    ChecksumMismatch {
        what: String,
        expected: String,
        found: String,
    },

    #[error("graph has no private owners to sample")]
    NoPrivateOwners,

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
