use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: invalid UTF-8")]
    InvalidUtf8 { path: PathBuf, line: usize },

    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Core {
        path: PathBuf,
        #[source]
        source: conledisco_core::Error,
    },

    #[error(transparent)]
    Pipeline(#[from] conledisco_core::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("missing {artifact}: run `{stage}` first")]
    MissingArtifact { artifact: PathBuf, stage: &'static str },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code: 2 for usage and configuration problems, 1 for
    /// everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::MissingArtifact { .. } => 2,
            _ => 1,
        }
    }
}
