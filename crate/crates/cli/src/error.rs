use pft_core::PftError;
use thiserror::Error;

/// Failure classes of a run, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn validation(field: &str, message: impl std::fmt::Display) -> Self {
        CliError::Validation {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    /// Core errors raised while checking one config field.
    pub fn field(field: &str, err: PftError) -> Self {
        if err.is_numerical() {
            CliError::Numerical(format!("{field}: {err}"))
        } else {
            CliError::validation(field, err)
        }
    }

    /// Core errors raised while an experiment runs.
    pub fn during(experiment: &str, err: PftError) -> Self {
        if err.is_numerical() {
            CliError::Numerical(format!("{experiment}: {err}"))
        } else {
            CliError::validation(experiment, err)
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation { .. } => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
            CliError::VerifyFailed(_) => "verify",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::VerifyFailed(_) => 3,
        }
    }

    /// `error[kind]: message` on one line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error[{}]: {msg}", self.kind())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
