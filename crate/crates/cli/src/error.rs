use std::process::ExitCode;

use edgroup::Error as CoreError;
use thiserror::Error;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Unsupported(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Unsupported(_) => 4,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Parse(_) | CoreError::Dimension { .. } | CoreError::Contract(_) => {
                CliError::Input(msg)
            }
            CoreError::Unsupported(_) | CoreError::UnsupportedRank(_) => CliError::Unsupported(msg),
            CoreError::Singular
            | CoreError::Degenerate(_)
            | CoreError::Conditioning(_)
            | CoreError::Convergence { .. }
            | CoreError::Invariant(_) => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
