use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{stage}: {source}")]
    Data {
        stage: &'static str,
        #[source]
        source: antiflow::Error,
    },
    #[error("{stage}: missing {} (run the `{required}` stage first)", path.display())]
    MissingArtifact {
        stage: &'static str,
        required: &'static str,
        path: PathBuf,
    },
    #[error("{}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit status: 1 usage, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Data { .. } | Error::MissingArtifact { .. } | Error::Artifact { .. } => 2,
            Error::Io { .. } | Error::Internal(_) => 3,
        }
    }

    pub fn artifact(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Artifact {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for antiflow::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| Error::Data { stage, source })
    }
}
