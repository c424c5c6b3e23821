use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("not enough correspondences: need at least {needed}, got {got}")]
    NotEnoughCorrespondences { needed: usize, got: usize },

    #[error("invalid quality value {value} for {kind}")]
    InvalidQuality { kind: &'static str, value: f64 },

    #[error("no model found: every sample was degenerate")]
    NoModelFound,

    #[error("synthetic problem generation failed: {0}")]
    GenerationFailed(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
