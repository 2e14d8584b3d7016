use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("signature violation: {0}")]
    Signature(String),

    #[error("free variable `{0}` is unassigned")]
    Unassigned(String),

    #[error("scale guard exceeded: {0}")]
    Guard(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot compare a {0}-type with a {1}-type")]
    DepthMismatch(u32, u32),

    #[error("witness mismatch: {0}")]
    Witness(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn guard(message: impl Into<String>) -> Self {
        Error::Guard(message.into())
    }
}
