use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("no linear region in the weight-sum curve (peak slope {max_slope:.4}); pass an explicit epsilon")]
    NoLinearRegion { max_slope: f64 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the `dmc` binary: 2 for usage and
    /// validation problems, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Degenerate(_) | Error::Parse { .. } => 2,
            Error::NoConvergence { .. } | Error::NoLinearRegion { .. } => 3,
            Error::Io { .. } => 4,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }
}
