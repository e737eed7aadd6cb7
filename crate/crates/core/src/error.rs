use thiserror::Error;

/// Failure categories shared by every stage of the pipeline.
///
/// The CLI maps `Config` and `Domain` to exit status 1 and `Integrity` to 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or unsupported input (labels, flags, vector syntax).
    #[error("configuration error: {0}")]
    Config(String),
    /// Input is well formed but outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An exact identity that must hold did not; indicates a bug upstream.
    #[error("integrity error: {0}")]
    Integrity(String),
    /// Request exceeds a configured size cap.
    #[error("resource error: {0}")]
    Resource(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Integrity(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
