use thiserror::Error;

/// Errors produced by the algebra and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {offset}: expected {expected}, found {found}")]
    Parse {
        offset: usize,
        expected: String,
        found: String,
    },

    #[error("exact division failed: {0}")]
    DivisionFails(String),

    #[error("jet order overflow: result needs order {needed} but the context has k = {k}")]
    OrderOverflow { needed: usize, k: usize },

    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("inner series must have zero constant term")]
    NonzeroConstantTerm,

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("singular point: every first partial derivative vanishes")]
    SingularPoint,

    #[error("frame Wronskian vanishes at the evaluation point")]
    FrameDegenerate,

    #[error("gcd(u, v*delta) = {0}, expected 1")]
    Gcd(u64),

    #[error("degree {d} is below the threshold d0 = {d0}")]
    TooSmall { d: u64, d0: u64 },

    #[error("index set has {size} elements, above the cap of {cap}")]
    IndexSetTooLarge { size: usize, cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
