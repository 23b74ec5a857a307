use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad group orders, arity mismatches, invalid tensors.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A hypothesis of a constructive lemma does not hold; the message
    /// carries a witness where it fails.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An enumeration or search exceeded its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Text-format parse failure with source position.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    /// Two distinct algebraic values could not be separated within the
    /// precision cap; callers should treat this as a hard failure.
    #[error("certified comparison exhausted at {0} bits")]
    CompareExhausted(u32),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
}
