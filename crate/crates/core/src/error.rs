//! Error taxonomy shared by all modules.
//!
//! The CLI maps these onto process exit codes: argument/precondition
//! failures are input errors (1), search failures and undetermined
//! outcomes are 2, numeric failures are 3.

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or inconsistent arguments (dimension mismatches, bad specs).
    #[error("argument error: {0}")]
    Argument(String),
    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Numerical breakdown: conditioning failure, invariant breach, division blowup.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A bounded search exhausted its budget without a witness.
    #[error("search failed: {0}")]
    SearchFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub(crate) fn search(msg: impl Into<String>) -> Self {
        Error::SearchFailure(msg.into())
    }
}
