use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] saddle_core::Error),

    #[error("spec error at line {line}: {msg}")]
    Spec { line: usize, msg: String },

    #[error("invalid run: {0}")]
    InvalidRun(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("optimum estimate failed: {0}")]
    OracleFailure(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
