use thiserror::Error;

/// Errors raised by the library.
///
/// Condition violations found by audits are data (see [`crate::report`]), not
/// errors; this type covers invalid inputs and broken preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("function is not proper: {0}")]
    Improper(String),

    #[error("point outside the epigraph window: {0}")]
    Window(String),

    #[error("(BLC) required: {0}")]
    BlcRequired(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
