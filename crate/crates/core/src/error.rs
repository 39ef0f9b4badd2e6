use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A row that could not be parsed at all.
    #[error("{file}:{line}: malformed row: {message}")]
    Malformed { file: String, line: u64, message: String },

    /// A row that parsed but breaks a data invariant.
    #[error("{file}:{line}: {message}")]
    Invalid { file: String, line: u64, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Inputs that were supposed to be derived from one another do not agree.
    #[error("inconsistent inputs: {0}")]
    Structure(String),

    #[error("failed to encode {what}: {message}")]
    Encode { what: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for I/O failures, 2 for everything the user can fix in the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Encode { .. } => 1,
            _ => 2,
        }
    }
}
