use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("length mismatch: expected {expected} bytes, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("sample {value} at index {index} exceeds the 10-bit range")]
    RangeError { index: usize, value: u32 },

    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("png decode error: {0}")]
    Decode(String),

    #[error("png encode error: {0}")]
    Encode(String),

    #[error("unsupported bit depth {0} (8-bit required)")]
    UnsupportedBitDepth(u8),

    #[error("unsupported png color type {0}")]
    UnsupportedColorType(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("image {width}x{height} smaller than the {window}x{window} window")]
    TooSmall {
        width: usize,
        height: usize,
        window: usize,
    },

    #[error("missing result for '{0}'")]
    MissingResult(String),

    #[error("result '{0}' has no matching label")]
    ExtraResult(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("scene '{scene}': {source}")]
    Scene {
        scene: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches the offending file to an error raised while handling it.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ (Error::Io { .. } | Error::File { .. }) => e,
            e => Error::File {
                path: path.into(),
                source: Box::new(e),
            },
        }
    }

    /// Short machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPattern(_) => "InvalidPattern",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::RangeError { .. } => "RangeError",
            Error::InvalidDimensions { .. } => "InvalidDimensions",
            Error::Decode(_) => "DecodeError",
            Error::Encode(_) => "EncodeError",
            Error::UnsupportedBitDepth(_) => "UnsupportedBitDepth",
            Error::UnsupportedColorType(_) => "UnsupportedColorType",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::TooSmall { .. } => "TooSmall",
            Error::MissingResult(_) => "MissingResult",
            Error::ExtraResult(_) => "ExtraResult",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Scene { source, .. } | Error::File { source, .. } => source.kind(),
            Error::Io { .. } => "IoError",
            Error::Json(_) => "JsonError",
        }
    }
}
