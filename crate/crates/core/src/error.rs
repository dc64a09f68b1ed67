use thiserror::Error;

/// Text-grammar failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("not in normal form: {0}")]
    NotNormalForm(String),
}

/// Failures of the ordinal operations themselves.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdError {
    #[error("not in normal form: {0}")]
    NotNormalForm(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("malformed json: {0}")]
    Json(String),
}
