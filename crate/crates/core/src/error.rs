use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the ordinal toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition (label range, lengths, K).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation was called in the wrong order, e.g. backward without forward.
    #[error("state error: {0}")]
    State(String),

    /// Non-finite values or other failures while optimizing.
    #[error("training error at epoch {epoch}, batch {batch}: {message}")]
    Training {
        epoch: usize,
        batch: usize,
        message: String,
    },

    /// Malformed input file; `line` is 1-based.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    /// A benchmark run failed; identifies the head and seed.
    #[error("run {head} (seed {seed}) failed: {source}")]
    Run {
        head: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the caller's inputs rather than by the library.
    pub fn is_user_error(&self) -> bool {
        match self {
            Error::Run { source, .. } => source.is_user_error(),
            other => matches!(
                other,
                Error::Domain(_) | Error::Parse { .. } | Error::Config(_) | Error::Io { .. }
            ),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attach the training position to a training error raised below the loop.
    pub(crate) fn at(self, ctx: crate::nn::StepContext) -> Self {
        match self {
            Error::Training { message, .. } => Error::Training {
                epoch: ctx.epoch,
                batch: ctx.batch,
                message,
            },
            other => other,
        }
    }
}
