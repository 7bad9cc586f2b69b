use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol block has zero energy; the power constraint cannot be met")]
    DegenerateSymbols,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("channel matrix is rank deficient and the noise variance is zero")]
    SingularChannel,

    #[error("retrieval index is empty")]
    EmptyIndex,

    #[error("cannot parse {}: {reason}", path.display())]
    Parse { path: PathBuf, reason: String },

    #[error("invalid configuration `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("missing dependency: {0}")]
    Dependency(String),

    #[error("plot error: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] ::image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateSymbols => "degenerate_symbols",
            Error::Shape(_) => "shape",
            Error::SingularChannel => "singular_channel",
            Error::EmptyIndex => "empty_index",
            Error::Parse { .. } => "parse",
            Error::Config { .. } => "config",
            Error::Dependency(_) => "dependency",
            Error::Plot(_) => "plot",
            Error::Io(_) => "io",
            Error::Image(_) => "image",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
