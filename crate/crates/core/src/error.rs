use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bad magic at byte offset 0: expected XTNSR01\\n")]
    BadMagic,

    #[error("unsupported dtype code {code:#04x} at byte offset 8")]
    UnsupportedDtype { code: u8 },

    #[error("unsupported rank {rank} at byte offset 9 (expected 4)")]
    UnsupportedRank { rank: u8 },

    #[error("truncated container: header needs {expected} bytes, file has {actual}")]
    TruncatedHeader { expected: usize, actual: usize },

    #[error("truncated payload: header declares {expected} values, found {actual} (payload starts at byte offset {offset})")]
    TruncatedPayload {
        expected: usize,
        actual: usize,
        offset: usize,
    },

    #[error("trailing bytes after payload: {extra} bytes past byte offset {offset}")]
    TrailingBytes { extra: usize, offset: usize },

    #[error("non-finite value {value} at flat index {index}")]
    NonFinite { index: usize, value: f32 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Short machine-readable tag used in the CLI's JSON error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BadMagic => "bad_magic",
            Error::UnsupportedDtype { .. } => "unsupported_dtype",
            Error::UnsupportedRank { .. } => "unsupported_rank",
            Error::TruncatedHeader { .. } => "truncated_header",
            Error::TruncatedPayload { .. } => "truncated_payload",
            Error::TrailingBytes { .. } => "trailing_bytes",
            Error::NonFinite { .. } => "non_finite",
            Error::Shape(_) => "shape",
            Error::InsufficientData(_) => "insufficient_data",
            Error::Config(_) => "config",
            Error::Undefined(_) => "undefined",
            Error::Numerical(_) => "numerical",
            Error::Table(_) => "table",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code: 2 for validation problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::Undefined(_) => 3,
            _ => 2,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Table(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Table(e.to_string())
    }
}
