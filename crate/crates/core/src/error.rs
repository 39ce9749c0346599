use thiserror::Error;

/// Errors raised by the analytics, oracle and simulators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested instance is too large for the chosen method.
    #[error("resource error: {0}")]
    Resource(String),
    /// The single-copy baseline has no finite copy count at unit fidelity.
    #[error("baseline undefined at F=1")]
    BaselineUndefined,
    /// A resource search did not find a feasible ensemble size.
    #[error("search failed: {0}")]
    SearchFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
