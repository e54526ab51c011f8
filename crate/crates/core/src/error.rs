use std::io;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown corruption strategy `{0}`")]
    UnknownStrategy(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("trusted vertex set is empty")]
    EmptyTrustedSet,

    #[error("only {found} of the {needed} required candidate clusters verified")]
    InsufficientVerified { found: usize, needed: usize },

    #[error("boost schedule rejected: {0}")]
    ScheduleRejected(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn at_stage(self, stage: &str) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }

    /// Name of the innermost pipeline stage that failed, if any.
    pub fn stage(&self) -> Option<&str> {
        match self {
            Error::Stage { stage, source } => source.stage().or(Some(stage.as_str())),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
