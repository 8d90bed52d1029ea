use thiserror::Error;

/// Errors produced by map construction, model ingest, and container I/O.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("duplicate key: {0:?}")]
    DuplicateKey(String),

    #[error("bad magic: not a compressed weight map container")]
    BadMagic,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u16),

    #[error("unknown hash algorithm id {0}")]
    UnknownHashAlgorithm(u8),

    #[error("truncated container payload")]
    Truncated,

    #[error("checksum mismatch: container is corrupt")]
    ChecksumMismatch,

    #[error("corrupt container: {0}")]
    Corrupt(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("class list mismatch between models")]
    ClassMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn empty(msg: impl Into<String>) -> Self {
        Error::EmptyInput(msg.into())
    }

    /// Renders a key for error messages; non-UTF-8 bytes are escaped.
    pub(crate) fn duplicate_key(key: &[u8]) -> Self {
        Error::DuplicateKey(String::from_utf8_lossy(key).into_owned())
    }
}
