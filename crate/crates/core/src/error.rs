use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("coefficient at {index} is not {p}-integral")]
    NonIntegral { index: String, p: u64 },

    #[error("precision error: {0}")]
    Precision(String),

    #[error("scale mismatch: {0} vs {1}")]
    ScaleMismatch(u32, u32),

    #[error("expansion is zero to its precision; no leading term")]
    NoLeadingTerm,

    #[error("construction of {name} failed: {reason}")]
    Construction { name: String, reason: String },

    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
