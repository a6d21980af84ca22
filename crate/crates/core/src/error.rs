use alloc::string::String;

/// Errors raised by the library. Search exhaustion is not an error; see
/// [`crate::Search`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("element {elem} out of range for universe of size {size}")]
    ElementOutOfRange { elem: u64, size: usize },
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error("value too large: {0}")]
    TooLarge(String),
    #[error("argument underflow: {0}")]
    Underflow(String),
    #[error("precondition fails: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;
