use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: file is empty")]
    EmptyFile { path: PathBuf },
    #[error("line {line}: expected {expected} values, found {found}")]
    RowDimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: non-finite value {value:?} for token {token:?}")]
    NonFinite {
        line: usize,
        token: String,
        value: String,
    },
    #[error("out-of-vocabulary token(s): {}", .0.join(", "))]
    OutOfVocabulary(Vec<String>),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("cannot project on zero-length axis {0:?}")]
    ZeroAxis(String),
    #[error("zero-norm vector {0:?} has no cosine distance")]
    ZeroNorm(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("{0}")]
    Empty(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("requested {requested} components but the data has rank {rank}")]
    Rank { requested: usize, rank: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
