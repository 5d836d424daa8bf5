use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),
    #[error("{requested} off-diagonal nonzeros requested but only {max} positions exist")]
    TooManyNonzeros { requested: usize, max: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] nna_core::Error),
}

impl IoError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        IoError::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;
