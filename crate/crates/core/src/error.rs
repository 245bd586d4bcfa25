use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("singular curve (discriminant is zero)")]
    SingularCurve,

    #[error("curve is not minimal at {0}")]
    NonMinimal(u64),

    #[error("cache corruption at line {line}: {reason}")]
    CacheCorruption { line: usize, reason: String },

    #[error("missing dependency: {0}")]
    DependencyMissing(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}
