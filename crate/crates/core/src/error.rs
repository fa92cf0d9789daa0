use std::io;

use thiserror::Error;

use crate::byte_code::CodeVariant;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// What went wrong on one line of an adjacency-text file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed integer {0:?}")]
    MalformedInteger(String),
    #[error("successor {successor} out of range for {n} nodes")]
    SuccessorOutOfRange { successor: u64, n: u64 },
    #[error("duplicate successor {0}")]
    DuplicateSuccessor(u32),
    #[error("successor {successor} follows {previous}; lists must be ascending")]
    NotAscending { previous: u32, successor: u32 },
    #[error("declared {declared} nodes but found {found} list lines")]
    NodeCountMismatch { declared: u64, found: u64 },
    #[error("missing node count")]
    MissingNodeCount,
    #[error("input must end with a newline")]
    MissingTrailingNewline,
    #[error("input is not ASCII text")]
    NotText,
    #[error("node count {0} exceeds the supported maximum")]
    TooManyNodes(u64),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("value {value} does not fit a variant {variant:?} codeword of width {width}")]
    ValueOutOfRange {
        value: u64,
        variant: CodeVariant,
        width: u8,
    },

    #[error("invalid codeword width {width} for variant {variant:?}")]
    InvalidWidth { variant: CodeVariant, width: u8 },

    #[error("truncated stream: {0}")]
    Truncated(&'static str),

    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("not a wgz container (bad magic)")]
    BadMagic,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("unknown codec id {0}")]
    UnknownCodec(u8),

    #[error("inconsistent block index: {0}")]
    IndexMismatch(String),

    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: u64, n: u64 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::Corrupt(msg.into())
    }
}
