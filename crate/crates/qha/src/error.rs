use std::path::PathBuf;

/// Failures of the experiment runner, each mapped to a process exit status.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error at line {line}: field `{field}`: {reason}")]
    Config { line: usize, field: String, reason: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error(transparent)]
    Numeric(#[from] qha_core::Error),

    #[error("tolerance failure: {}", .0.join(", "))]
    Tolerance(Vec<String>),
}

impl RunError {
    /// `2` for invalid configuration, `1` for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn format(what: &'static str, reason: impl ToString) -> Self {
        RunError::Format { what, reason: reason.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;
