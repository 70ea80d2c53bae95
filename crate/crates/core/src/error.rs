use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the feature pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),

    #[error("expected mono audio, found {0} channels")]
    ChannelMismatch(u16),

    #[error("expected a sample rate of {expected} Hz, found {found} Hz")]
    RateMismatch { expected: u32, found: u32 },

    #[error("corrupt audio file: {0}")]
    CorruptFile(String),

    #[error("signal too short: {samples} samples, need at least {required}")]
    TooShort { samples: usize, required: usize },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("filter {index} covers no DFT bin")]
    EmptyFilter { index: usize },

    #[error("augmentation shift {0} Mel appears more than once")]
    DuplicateShift(f64),

    #[error("augmentation plan must contain the zero shift")]
    MissingZeroShift,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate utterance id `{0}`")]
    DuplicateId(String),

    #[error("utterance `{id}`: {source}")]
    Utterance {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid matrix file: {0}")]
    MatrixFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
