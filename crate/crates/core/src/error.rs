use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: u64, reason: String },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("unknown record id `{0}`")]
    UnknownId(String),

    #[error("no embedding stored for id `{0}`")]
    MissingEmbedding(String),

    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,

    #[error("embedding for `{0}` is an all-zero vector")]
    ZeroEmbedding(String),

    #[error("bad magic bytes: expected `DFV1`")]
    BadMagic,

    #[error("vector for `{id}` has {found} components, expected {expected}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("vector dimension must be positive")]
    ZeroDimension,

    #[error("vector for `{0}` has a non-finite component")]
    NonFiniteComponent(String),

    #[error("vector file truncated while reading {0}")]
    TruncatedFile(&'static str),

    #[error("vector file has {0} trailing bytes after the last entry")]
    TrailingBytes(usize),

    #[error("invalid UTF-8 in vector file {0}")]
    InvalidUtf8(&'static str),

    #[error("measure `{0}` is missing from at least one score row")]
    MissingMeasure(&'static str),

    #[error("no predicted pair carries a resolved ground-truth verdict")]
    NoOverlap,

    #[error("measure `{0}` has zero variance")]
    DegenerateVariance(&'static str),

    #[error("need at least two rows to correlate, got {0}")]
    TooFewRows(usize),

    #[error("invalid verdict `{0}`")]
    InvalidVerdict(String),

    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn io_at(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::IoFailure {
        path: path.to_path_buf(),
        source,
    }
}
