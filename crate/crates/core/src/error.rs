use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters: register bits, generator settings, unsupported `p`.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("incompatible counters: {0}")]
    Incompatible(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by bad input data rather than bad parameters.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::NodeOutOfRange { .. } | Error::Input(_) | Error::Io(_) | Error::Undefined(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
