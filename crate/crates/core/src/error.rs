use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PicError>;

#[derive(Debug, Error)]
pub enum PicError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: no records")]
    NoRecords { path: PathBuf },

    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("record {row} has no subject identifiers; subject_a and subject_b are required for a subject-exclusive split")]
    MissingSubjects { row: usize },

    #[error("all records belong to a single subject `{0}`; cannot split")]
    SingleSubject(String),

    #[error("{class} scores are empty")]
    EmptyClass { class: &'static str },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("confidence {value} at index {index} is outside [0, 1]")]
    ConfidenceOutOfRange { index: usize, value: f64 },

    #[error("unsupported model format version {found} (expected {expected})")]
    UnsupportedVersion { found: String, expected: u32 },

    #[error("model file parse error: {0}")]
    ModelParse(#[from] serde_json::Error),

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

impl PicError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PicError::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from bad input or arguments rather than the
    /// environment. The CLI maps these to exit status 2.
    pub fn is_validation(&self) -> bool {
        !matches!(self, PicError::Io { .. })
    }
}
