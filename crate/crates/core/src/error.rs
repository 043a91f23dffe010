use thiserror::Error;

/// Errors raised by diagram construction and the calculus operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("vertexless loop formed while gluing {0}")]
    VertexlessLoop(String),
    #[error("grade above configured caps: {0}")]
    AboveCaps(String),
    #[error("degenerate covariance: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("label {0} has no image under the relabeling")]
    MissingImage(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("not substantial: {0}")]
    NotSubstantial(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
