use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    Dimension { left: usize, right: usize },
    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    Size {
        what: &'static str,
        needed: usize,
        cap: usize,
    },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// CLI exit code: 1 for configuration problems, 2 for everything the
    /// pipeline itself rejects.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
