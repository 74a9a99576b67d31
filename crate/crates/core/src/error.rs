use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("malformed graph6: {0}")]
    Graph6(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("graph on {n} vertices exceeds the exact solver cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    /// An exact search came back empty where existence is guaranteed.
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("search budget exhausted before a decision: {0}")]
    Timeout(String),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Error {
        Error::Io(e.to_string())
    }
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
