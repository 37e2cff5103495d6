use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed corpus line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("duplicate article id {0:?}")]
    DuplicateId(String),
    #[error("invalid article {id:?}: {message}")]
    InvalidArticle { id: String, message: String },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("numeric overflow at step {step}")]
    NumericOverflow { step: usize },
    #[error("non-finite gradient, no update applied")]
    NonFiniteGradient,
    #[error("training diverged at step {step}: non-finite loss")]
    Diverged { step: u64 },
    #[error("embedding file error: {0}")]
    EmbeddingFormat(String),
    #[error("vocabulary file error: {0}")]
    VocabularyFormat(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("empty prediction set")]
    EmptyPredictions,
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
