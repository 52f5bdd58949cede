use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// Bad magic, unsupported version, truncated or otherwise malformed file.
    #[error("format error: {0}")]
    Format(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("no label set for image `{0}`")]
    MissingLabels(String),

    #[error("unknown transform id {0}")]
    UnknownTransform(u32),

    #[error("empty {0}")]
    Empty(String),

    #[error("exhaustive search refused: {got} transforms exceeds the limit of {max}")]
    TooLarge { got: usize, max: usize },

    #[error("non-finite value during adaptation: {0}")]
    NonFinite(String),

    /// Inputs that parse fine but disagree with each other.
    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }

    pub(crate) fn empty(what: impl Into<String>) -> Self {
        Error::Empty(what.into())
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 2 is reserved for usage errors (emitted by the argument parser), 3 for
    /// format/version problems and 4 for data inconsistencies.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Format(_) | Error::InvalidImage(_) => 3,
            Error::InvalidArgument(_) => 2,
            _ => 4,
        }
    }
}
