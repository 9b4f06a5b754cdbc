use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by corpus loading, vectorization, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus directory not found: {0}")]
    MissingDirectory(PathBuf),
    #[error("no documents in {0}")]
    NoDocuments(PathBuf),
    #[error("file is not valid UTF-8: {0}")]
    NotUtf8(PathBuf),
    #[error("unknown doc_id {0}")]
    UnknownDocId(String),
    #[error("duplicate doc_id {0}")]
    DuplicateDocId(String),
    #[error("malformed labels file: {0}")]
    LabelFormat(String),
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("empty co-occurrence")]
    EmptyCooccurrence,
    #[error("matrix has no nonzero entries")]
    ZeroMatrix,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no supervision: mask marks every column unknown")]
    NoSupervision,
    #[error("empty split: {0}")]
    EmptySplit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
