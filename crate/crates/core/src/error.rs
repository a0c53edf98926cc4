use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed input file. `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("linear program is {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}
