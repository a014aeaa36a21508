use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("symbol index {index} out of range for {rank} generators")]
    SymbolRange { index: usize, rank: usize },
    #[error("alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("word length not computable within BFS radius {0}")]
    RadiusExceeded(usize),
    #[error("ball enumeration exceeded the element cap {0}")]
    CapExceeded(usize),
    #[error("inconsistent coset table: {0}")]
    CosetTable(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("analysis unavailable: {0}")]
    AnalysisUnavailable(String),
    #[error("precision insufficient: {0}")]
    Precision(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
