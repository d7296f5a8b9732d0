use std::path::{Path, PathBuf};

use thiserror::Error;
use titledup_core::pairing::PairKey;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("pair {0} is not in the annotation queue")]
    UnknownPair(PairKey),

    #[error("invalid verdict `{0}` (expected duplicate, not_duplicate or unsure)")]
    InvalidVerdict(String),

    #[error("rater name is required")]
    MissingRater,

    #[error("queued pair references unknown record `{0}`")]
    UnknownRecord(String),

    #[error("cannot read truth file {path}: {source}")]
    Truth {
        path: PathBuf,
        #[source]
        source: titledup_core::Error,
    },

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ServiceError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ServiceError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
