use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
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

    #[error("utterance `{utterance}`: {message}")]
    Validation { utterance: String, message: String },

    #[error("invalid model: {0}")]
    Invariant(String),

    #[error("unsupported model version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("audio `{path}`: {message}")]
    Audio { path: PathBuf, message: String },

    #[error("degenerate speaker `{speaker}`: {message}")]
    DegenerateSpeaker { speaker: String, message: String },

    #[error("insufficient data: need at least {needed} {what}, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("unknown speaker `{0}`")]
    UnknownSpeaker(String),

    #[error("speaker `{0}` already exists in model")]
    SpeakerExists(String),

    #[error("phone `{0}` has no duration intervals and the model has no global fallback")]
    UnknownPhone(String),

    #[error("{feature} token {token} out of range [0, {max}]")]
    TokenRange {
        feature: &'static str,
        token: i64,
        max: usize,
    },

    #[error("{feature} offset {offset} out of range [-{limit}, +{limit}]")]
    OffsetRange {
        feature: &'static str,
        offset: i32,
        limit: i32,
    },

    #[error("utterance `{utterance}`: phone {phone_index} ends at {end_s}s, beyond the F0 track ({extent_s}s)")]
    TrackExtent {
        utterance: String,
        phone_index: usize,
        end_s: f64,
        extent_s: f64,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(utterance: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            utterance: utterance.into(),
            message: message.into(),
        }
    }

    /// True for failures of the filesystem itself, as opposed to bad content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
