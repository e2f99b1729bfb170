use thiserror::Error;

/// Crate-wide error type.
///
/// `Usage` covers caller mistakes (bad arguments, out-of-range indices);
/// everything else is a data, I/O, or feasibility problem. The CLI maps
/// `Usage` to exit code 1 and the rest to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("topology generation infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by how the caller invoked an operation, as
    /// opposed to bad data or an infeasible configuration.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
