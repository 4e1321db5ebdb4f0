use std::io;

/// Errors surfaced by the drivers and the command line.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ucover_core::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// Process exit code: 1 for precondition and contract failures, 2 for
    /// resource limits and IO, 64 for usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) if e.is_resource() => 2,
            Error::Core(_) | Error::Format(_) => 1,
            Error::Io(_) | Error::Pool(_) => 2,
            Error::Json(_) | Error::Csv(_) => 2,
            Error::Usage(_) => 64,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
