use std::path::PathBuf;

/// Errors produced by the simulator, the experiment harness and the file formats.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A non-finite or otherwise out-of-domain numeric value reached a computation.
    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    /// A configuration value violates its documented constraints.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A caller broke an input contract (e.g. unsorted spike trains).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Decoding was asked to vote over a bundle that produced no activity.
    #[error("no activity to decode")]
    NoActivity,

    /// A metric was asked for more data than it was given.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A weight archive or config file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wraps an I/O failure on `path`.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(value: f64, what: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NumericDomain(format!("{what} is not finite ({value})")))
    }
}
