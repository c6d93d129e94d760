use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed edge-list or word text.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("words have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("vertex {vertex} is out of range for a graph of order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertex {y} is unreachable from vertex {x}")]
    Unreachable { x: usize, y: usize },

    #[error("path metadata is undefined for identical endpoints ({0})")]
    IdenticalEndpoints(usize),

    /// The requested formula does not apply to this base graph or word pair.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("explicit construction needs {needed} vertices, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("path enumeration exceeded {cap} node expansions")]
    SearchLimit { cap: u64 },

    #[error("distance does not fit in 64 bits at level {level}")]
    Overflow { level: usize },

    #[error("not a path in S(G,t): {0}")]
    NotAPath(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn not_applicable(message: impl Into<String>) -> Self {
        Error::NotApplicable(message.into())
    }
}
