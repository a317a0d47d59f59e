use std::io;
use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// A certificate or identity check did not pass; the report is still valid.
    pub const FAILED: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const DOMAIN: u8 = 3;
    pub const OUTPUT: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] kcompound::Error),
    /// Missing or conflicting options that clap cannot express.
    #[error("{0}")]
    Usage(String),
    /// Valid arguments that do not make sense together.
    #[error("{0}")]
    Unsupported(String),
}

impl CliError {
    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Read { .. } | CliError::Usage(_) => exit::PARSE,
            CliError::Core(_) | CliError::Unsupported(_) => exit::DOMAIN,
            CliError::Write { .. } => exit::OUTPUT,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
