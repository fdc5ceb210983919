use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("invariant failures: {}", .0.join("; "))]
    Invariant(Vec<String>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Capacity(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<unitri::Error> for CliError {
    fn from(e: unitri::Error) -> Self {
        match e {
            unitri::Error::Usage(m) => CliError::Usage(m),
            unitri::Error::Capacity { what, requested, limit } => {
                CliError::Capacity(format!("{what} needs {requested}, limit is {limit}"))
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
