use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] degproc::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fixture suspect: {0}")]
    FixtureSuspect(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
