use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Exit status for a successful run.
pub const EXIT_PASS: i32 = 0;
/// Exit status for I/O and other internal failures.
pub const EXIT_INTERNAL: i32 = 1;
/// Exit status for malformed or invalid input.
pub const EXIT_INPUT: i32 = 2;
/// Exit status when a run completes but its verification fails.
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// The input is not well formed.
    #[error("parse error: {0}")]
    Parse(String),

    /// The input is well formed but describes an invalid object.
    #[error("validation error: {0}")]
    Validation(String),

    /// A library precondition failed.
    #[error("{0}")]
    Precondition(#[from] pellip_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// Short stable identifier, printed alongside the message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "E_PARSE",
            CliError::Validation(_) => "E_VALIDATION",
            CliError::Precondition(_) => "E_PRECONDITION",
            CliError::Io(_) => "E_IO",
            CliError::Internal(_) => "E_INTERNAL",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) | CliError::Precondition(_) => EXIT_INPUT,
            CliError::Io(_) | CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}
