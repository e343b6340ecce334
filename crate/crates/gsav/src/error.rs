use thiserror::Error;

/// Failures of the harness, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numeric failure at step {step}: {source}")]
    Numeric {
        step: u64,
        #[source]
        source: gsav_core::Error,
    },
    #[error("invariant violated at step {step}: {detail}")]
    Invariant { step: u64, detail: String },
    #[error("verification failed: {failed} of {total} checks")]
    Verification { failed: usize, total: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 1,
            HarnessError::Numeric { .. } => 2,
            HarnessError::Invariant { .. } | HarnessError::Verification { .. } => 3,
        }
    }
}

impl From<gsav_core::Error> for HarnessError {
    /// Errors raised outside a step come from constructors and parameter checks.
    fn from(e: gsav_core::Error) -> Self {
        HarnessError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
