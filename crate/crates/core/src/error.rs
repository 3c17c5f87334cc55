use thiserror::Error;

use crate::module::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a supported prime characteristic")]
    InvalidPrime(u32),

    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown element label `{0}`")]
    UnknownLabel(String),

    #[error("relations contain a cycle through `{0}` and `{1}`")]
    Cycle(String, String),

    #[error("not an interval: {0}")]
    NotAnInterval(String),

    #[error("modules live over different posets")]
    HostMismatch,

    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u32, u32),

    #[error("invalid family specification: {0}")]
    InvalidFamily(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("representation is not commutative: {0}")]
    NonCommutative(Violation),

    #[error("resolution did not terminate within {0} steps")]
    StepLimit(usize),

    #[error("brute-force cap exceeded: {0}")]
    CapExceeded(String),

    #[error("internal invariant breached: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonCommutative(_) | Error::Cycle(..) | Error::NotAnInterval(_) => 2,
            Error::StepLimit(_) | Error::Internal(_) => 3,
            _ => 1,
        }
    }
}
