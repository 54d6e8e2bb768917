use alloc::string::String;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("support overflow: {0}")]
    SupportOverflow(String),

    #[error("insufficient accuracy: {what} (measured {measured:e})")]
    Accuracy { what: String, measured: f64 },

    #[error("truncation leakage: {what} (measured {measured:e})")]
    Leakage { what: String, measured: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn arg(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
