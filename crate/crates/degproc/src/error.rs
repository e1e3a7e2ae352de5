use alloc::string::String;

/// Errors raised by the core crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid degree sequence: {0}")]
    InvalidDegrees(String),
    #[error("cut degree k={k} out of range (need 1 <= k < {delta})")]
    CutOutOfRange { k: u32, delta: u32 },
    #[error("point {0} does not exist")]
    NoSuchPoint(String),
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("edge {0} is not present")]
    EdgeAbsent(String),
    #[error("configuration graph is incomplete")]
    Incomplete,
    #[error("malformed edge sequence: {0}")]
    MalformedSequence(String),
    #[error("invalid anchor: {0}")]
    InvalidAnchor(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("retry budget of {0} attempts exhausted")]
    RetriesExhausted(u64),
    #[error("integration failed: {0}")]
    Integration(String),
}
