//! Error type shared by all modules.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, GlassError>;

#[derive(Debug, thiserror::Error)]
pub enum GlassError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("image is {height}x{width} but both dimensions must be at least {min} pixels")]
    ImageTooSmall {
        height: usize,
        width: usize,
        min: usize,
    },

    #[error("crop at top={top}, left={left}, side={side} is out of bounds for a {height}x{width} image")]
    CropOutOfBounds {
        top: usize,
        left: usize,
        side: usize,
        height: usize,
        width: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("checkpoint is corrupt: {0}")]
    CorruptCheckpoint(String),

    #[error("training diverged: loss became non-finite at epoch {epoch}, step {step}")]
    Diverged { epoch: usize, step: usize },

    #[error("bitmap of {pixels} pixels exceeds the Monte Carlo cap of {cap}")]
    BitmapTooLarge { pixels: usize, cap: usize },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl GlassError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GlassError::Io {
            path: path.into(),
            source,
        }
    }
}
