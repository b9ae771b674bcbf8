use partdist_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: u64, message: String },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error("{0}")]
    Output(String),
    #[error("{failed} of {total} expectations differ")]
    Expectations { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: impl Into<String>, error: std::io::Error) -> Self {
        CliError::Io { path: path.into(), error }
    }

    /// 2 for requests that cannot be carried out as posed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                Error::EnumerationTooLarge { .. }
                | Error::EmptySet { .. }
                | Error::InvalidDimensions { .. }
                | Error::NotMultiple { .. }
                | Error::TooManyMoves { .. }
                | Error::TooLargeForBruteForce { .. },
            ) => 2,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
