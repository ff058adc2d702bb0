use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the sonification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("invalid mapping limits: {0}")]
    InvalidLimits(String),

    #[error("parameter `{param}` {reason}")]
    InvalidParameter { param: String, reason: String },

    #[error("column `{0}` not found")]
    UnknownColumn(String),

    #[error("column length mismatch: `{column}` has {got} rows, expected {expected}")]
    LengthMismatch {
        column: String,
        got: usize,
        expected: usize,
    },

    #[error("duplicate mapping for parameter `{0}`")]
    DuplicateMapping(String),

    #[error("time column must be strictly increasing (rows {0} and {1})")]
    NonMonotonicTime(usize, usize),

    #[error("malformed note name `{0}`")]
    BadNoteName(String),

    #[error("note octave {0} outside supported range -1..=9")]
    OctaveOutOfRange(i32),

    #[error("invalid score: {0}")]
    InvalidScore(String),

    #[error("invalid generator config: {0}")]
    InvalidGenerator(String),

    #[error("empty sample bank")]
    EmptySampleBank,

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("unknown audio system `{0}`")]
    UnknownSystem(String),

    #[error("buffer length mismatch: {0}")]
    BufferMismatch(String),

    #[error("invalid render plan: {0}")]
    InvalidPlan(String),

    #[error("preset error at `{path}`: {reason}")]
    Preset { path: String, reason: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("wav format error: {0}")]
    WavFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
