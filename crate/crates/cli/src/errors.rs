use std::process::ExitCode;

/// Process-level failure classes. The numeric codes are part of the CLI
/// contract: 0 success, 1 usage, 2 data, 3 acceptance.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("acceptance criteria not met:\n{0}")]
    Acceptance(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Data(_) => ExitCode::from(2),
            CliError::Acceptance(_) => ExitCode::from(3),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<toml::ser::Error> for CliError {
    fn from(e: toml::ser::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}
