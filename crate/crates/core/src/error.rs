use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed JSON. `offset` is a byte offset into the document.
    #[error("{}: invalid JSON at byte {offset}: {message}", path.display())]
    Json {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    /// A JSON document that parses but does not match the annotation schema.
    #[error("{}: schema error at `{field}`: {message}", path.display())]
    Schema {
        path: PathBuf,
        field: String,
        message: String,
    },

    #[error("shape {index}: polygon has {count} points, at least 3 required")]
    TooFewPoints { index: usize, count: usize },

    #[error("ambiguous dataset item `{stem}`: {first} and {second} share a stem")]
    Ambiguous {
        stem: String,
        first: String,
        second: String,
    },

    #[error("cannot decode {}: {message}", path.display())]
    Decode { path: PathBuf, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    Shape {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("detection failed: {0}")]
    Detection(String),

    #[error("unmatched record id `{id}`")]
    Pairing { id: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Shape {
            left_w: left.0,
            left_h: left.1,
            right_w: right.0,
            right_h: right.1,
        }
    }

    /// True for failures of the environment (filesystem, unreadable files)
    /// rather than of the data or arguments.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
