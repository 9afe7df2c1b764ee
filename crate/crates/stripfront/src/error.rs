use thiserror::Error;

/// Crate-wide error type.
///
/// `Domain` means a precondition on the inputs was violated (wrong parameter
/// range, wrong regime for a construction); `Numerical` means an algorithm
/// failed to converge or produced an inconsistent result. The CLI maps these
/// to exit codes 2 and 3 respectively.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn numerical<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Numerical(msg.into()))
}
