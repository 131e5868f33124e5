use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Flags that parse individually but do not form a valid request.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] mary_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(mary_core::Error::Convergence { .. }) => 4,
            CliError::Core(_) => 3,
            CliError::Io { .. } => 5,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
