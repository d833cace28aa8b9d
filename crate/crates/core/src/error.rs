use std::path::PathBuf;

use thiserror::Error;

use crate::types::{TopicId, UserId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("unknown user {0}")]
    UnknownUser(UserId),
    #[error("unknown topic {0}")]
    UnknownTopic(TopicId),
    #[error("no candidate group satisfies the query")]
    EmptyResult,
    #[error("aggregate distance of an empty group")]
    EmptyGroup,
    #[error("no topic to select from")]
    NoTopic,
    #[error("no training pairs could be built")]
    NoTrainingData,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
