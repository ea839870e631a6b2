use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the lightfield toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// `arctan2` evaluated at the origin, where the angle is undefined.
    #[error("arctan2 is undefined at the origin")]
    UndefinedAngle,

    #[error("angular bin index {k} out of range for radius {radius} ({bins} bins)")]
    BinOutOfRange { radius: usize, k: usize, bins: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("unsupported image magic {0:?} (expected P5 or P6)")]
    UnsupportedMagic(String),

    #[error("malformed image header: {0}")]
    MalformedHeader(String),

    #[error("truncated image payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed polar archive: {0}")]
    Archive(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
