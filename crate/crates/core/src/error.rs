use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A malformed run-configuration line.
    #[error("config error (line {line}): {msg}")]
    Config { line: usize, msg: String },

    /// A computed result violates one of the module invariants.
    #[error("invariant violated in {module}: {msg}")]
    Invariant { module: &'static str, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Invariant { module, msg: msg.into() }
    }

    /// Process exit status: 2 for invalid input, 3 for a violated invariant, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Domain(_) => 2,
            Error::Invariant { .. } => 3,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
