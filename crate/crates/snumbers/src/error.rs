//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("mixed scalar modes: {0}")]
    MixedModes(String),

    #[error("rank-deficient input: {0}")]
    RankDeficient(String),

    #[error("degenerate input of affine dimension {actual}, expected {expected}")]
    Degenerate { actual: usize, expected: usize },

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("unsupported norm kind: {0}")]
    Norm(String),

    #[error("{0}")]
    Witness(String),

    #[error("certificate not applicable: {0}")]
    Certificate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
