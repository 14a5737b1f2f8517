use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hop threshold must be at least 1 (got {0})")]
    InvalidHop(u32),

    #[error("worker count must be at least 1")]
    InvalidWorkers,

    #[error("vertex id {0} does not fit the 32-bit vertex index")]
    VertexOverflow(u64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("computation cancelled")]
    Cancelled,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_hop(h: u32) -> Result<()> {
    if h == 0 {
        Err(Error::InvalidHop(h))
    } else {
        Ok(())
    }
}
