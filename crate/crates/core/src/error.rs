use std::io;

use thiserror::Error;

/// Errors surfaced by the mining pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or a model that does not fit the requested use.
    #[error("configuration error: {0}")]
    Config(String),
    /// A caller-supplied argument violates an operation precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("training error: {0}")]
    Training(String),
    /// Dataset construction could not satisfy the variant specification.
    #[error("build error: {0}")]
    Build(String),
    #[error("export error: {0}")]
    Export(String),
    /// Malformed model container or interchange file.
    #[error("format error: {0}")]
    Format(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for errors caused by bad input or configuration rather than the runtime.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Argument(_))
    }
}
