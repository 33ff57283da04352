use thiserror::Error;

use crate::amm::TradeId;

pub type Result<T, E = ClvrError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ClvrError {
    #[error("invalid pool: {0}")]
    InvalidPool(String),

    #[error("invalid trade {id}: {reason}")]
    InvalidTrade { id: TradeId, reason: String },

    #[error("execution of trade {id} produced a non-finite or draining result")]
    Execution { id: TradeId },

    #[error("ordering is not a permutation of the block: {0}")]
    NotAPermutation(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("block of {n} trades exceeds the brute-force cap of {cap}")]
    Intractable { n: usize, cap: usize },

    #[error("line {line}: {reason}")]
    Ingest { line: u64, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Tractability,
    Numeric,
}

impl ClvrError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            ClvrError::Io(_) => ErrorKind::Io,
            ClvrError::Intractable { .. } => ErrorKind::Tractability,
            ClvrError::Execution { .. } | ClvrError::UndefinedMetric(_) => ErrorKind::Numeric,
            _ => ErrorKind::Validation,
        }
    }
}
