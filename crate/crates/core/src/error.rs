use thiserror::Error;

/// Errors raised by the laboratory.
///
/// The split between usage and capacity errors is load-bearing: the command
/// line front end maps them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("capacity error: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
