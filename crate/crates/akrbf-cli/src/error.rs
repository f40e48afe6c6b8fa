use thiserror::Error;

/// Harness-level errors, classified by the exit code they map to:
/// 2 config, 3 data, 4 divergence, 5 gradcheck failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("gradient check failed: {0}")]
    Gradcheck(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Divergence(_) => 4,
            CliError::Gradcheck(_) => 5,
        }
    }

    pub fn config(err: impl std::fmt::Display) -> Self {
        CliError::Config(err.to_string())
    }

    pub fn data(err: impl std::fmt::Display) -> Self {
        CliError::Data(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
