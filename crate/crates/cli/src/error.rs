use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Precondition(#[from] bixon_core::Error),
    #[error("{failed} validation check(s) failed")]
    Validation { failed: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Validation { .. } => 4,
            CliError::Io(_) => 1,
        })
    }
}
