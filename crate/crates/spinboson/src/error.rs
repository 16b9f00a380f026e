use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] spinboson_core::Error),
    #[error("{0}")]
    Refused(String),
    #[error("serialisation failed: {0}")]
    Encode(String),
}

/// Process exit status for a completed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailed,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::VerificationFailed => 1,
        }
    }
}

impl CliError {
    /// Every error that aborts a command maps to the configuration exit code.
    pub fn code(&self) -> i32 {
        2
    }
}
