use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid reference: {0}")]
    InvalidReference(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("capacity exceeded: {what} is {size}, cap is {cap}")]
    Capacity {
        what: String,
        size: String,
        cap: usize,
    },

    #[error("line {line}: {field}: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("player {player} has no path from node {source_node} to node {target_node}")]
    InfeasiblePlayer {
        player: usize,
        source_node: usize,
        target_node: usize,
    },

    #[error("generator error: {0}")]
    Generator(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn capacity(what: impl Into<String>, size: impl ToString, cap: usize) -> Self {
        Error::Capacity {
            what: what.into(),
            size: size.to_string(),
            cap,
        }
    }
}
