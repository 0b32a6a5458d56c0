use thiserror::Error;

/// Errors raised by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ring mismatch: Z/{0} vs Z/{1}")]
    RingMismatch(u64, u64),
    #[error("group mismatch")]
    GroupMismatch,
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("relation `{relation}` violated (witness {witness:?})")]
    RelationViolated { relation: String, witness: Vec<u64> },
    #[error("no ring map Z/{from} -> Z/{to}")]
    NoRingMap { from: u64, to: u64 },
    #[error("p-adic precision exhausted: {0}")]
    Precision(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
