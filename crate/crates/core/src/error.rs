use thiserror::Error;

/// Errors raised by the core domain types and the tensor file format.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("non-finite values in {0}")]
    NonFinite(String),

    #[error("invalid one-hot label map: {0}")]
    NotOneHot(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid tensor header: {0}")]
    BadHeader(String),

    #[error("tensor payload size mismatch: header declares {expected} values, payload holds {actual}")]
    PayloadSizeMismatch { expected: usize, actual: usize },

    #[error("dataset split is not disjoint: case {0} appears in more than one split")]
    SplitOverlap(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error at {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl CoreError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn json(path: &std::path::Path, source: serde_json::Error) -> Self {
        CoreError::Json {
            path: path.display().to_string(),
            source,
        }
    }
}
