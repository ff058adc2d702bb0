use std::fmt;

/// CLI failure classes map onto exit codes: configuration errors exit 1,
/// data errors exit 2, I/O errors exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// Classify a core error raised while ingesting or binding data.
    pub fn from_data_stage(err: sonify_core::Error) -> Self {
        use sonify_core::Error as E;
        match err {
            E::Io(e) => CliError::Io(e.to_string()),
            E::UnknownColumn(_)
            | E::LengthMismatch { .. }
            | E::EmptyData(_)
            | E::NonMonotonicTime(_, _)
            | E::WavFormat(_)
            | E::EmptySampleBank => CliError::Data(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }

    pub fn from_config_stage(err: sonify_core::Error) -> Self {
        match err {
            sonify_core::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
