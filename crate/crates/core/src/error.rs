//! Error type shared by every stage of the pipeline.

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(PathBuf),

    #[error("corrupt image {path}: {reason}")]
    CorruptImage { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid dimensions {width}x{height}: {reason}")]
    InvalidDimensions {
        width: u32,
        height: u32,
        reason: &'static str,
    },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },

    #[error("rectangle {rect:?} does not fit inside a {width}x{height} image")]
    RectOutOfBounds {
        rect: crate::Rect,
        width: u32,
        height: u32,
    },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// Every pixel of the histogram sits in one bin; `value` is that bin.
    #[error("degenerate histogram: every pixel has value {value}")]
    DegenerateHistogram { value: u8 },

    #[error("no foreground: the white and black scans are indistinguishable")]
    NoForeground,

    #[error("length mismatch: {auto} automatic counts vs {truth} reference counts")]
    LengthMismatch { auto: usize, truth: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("could not place {placed} of {requested} objects within the attempt budget")]
    PlacementFailure { placed: usize, requested: usize },

    #[error("shift ({dx}, {dy}) moves a seed out of the frame")]
    ShiftOutOfFrame { dx: i32, dy: i32 },

    #[error("input directory not found: {0}")]
    InputDirNotFound(PathBuf),

    #[error("no supported images in {0}")]
    EmptyFolder(PathBuf),

    #[error("failed writing output {path}: {reason}")]
    OutputIo { path: PathBuf, reason: String },

    #[error("no reference count for {0}")]
    MissingTruthRow(String),

    #[error("parse error in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
}

impl Error {
    /// Short name of the variant, used as the skip reason in batch reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FileNotFound(_) => "FileNotFound",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::CorruptImage { .. } => "CorruptImage",
            Error::Io { .. } => "IoError",
            Error::InvalidDimensions { .. } => "InvalidDimensions",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::RectOutOfBounds { .. } => "RectOutOfBounds",
            Error::InvalidParams(_) => "InvalidParams",
            Error::DegenerateHistogram { .. } => "DegenerateHistogram",
            Error::NoForeground => "NoForeground",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::EmptyInput => "EmptyInput",
            Error::PlacementFailure { .. } => "PlacementFailure",
            Error::ShiftOutOfFrame { .. } => "ShiftOutOfFrame",
            Error::InputDirNotFound(_) => "InputDirNotFound",
            Error::EmptyFolder(_) => "EmptyFolder",
            Error::OutputIo { .. } => "OutputIoError",
            Error::MissingTruthRow(_) => "MissingTruthRow",
            Error::Parse { .. } => "ParseError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
