use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("tensor error: {0}")]
    Tensor(#[from] candle_core::Error),
    #[error(transparent)]
    Core(#[from] cosc_core::Error),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("checkpoint stamp mismatch: expected {expected}, found {found}")]
    StampMismatch { expected: String, found: String },
    #[error("checkpoint {path} has no tensor `{name}`")]
    MissingTensor { path: String, name: String },
    #[error("missing prerequisite: {0}")]
    Dependency(String),
    #[error("non-finite loss in {stage} at step {step}: {value}")]
    NonFinite { stage: String, step: usize, value: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl NnError {
    pub fn shape(msg: impl Into<String>) -> Self {
        NnError::Shape(msg.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NnError::Tensor(_) => "tensor",
            NnError::Core(e) => e.kind(),
            NnError::Shape(_) => "shape",
            NnError::StampMismatch { .. } => "stamp_mismatch",
            NnError::MissingTensor { .. } => "checkpoint",
            NnError::Dependency(_) => "dependency",
            NnError::NonFinite { .. } => "non_finite_loss",
            NnError::Io(_) => "io",
            NnError::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, NnError>;
