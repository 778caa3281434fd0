use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A state with zero norm where a physical (normalizable) state was
    /// required, i.e. a detection sequence that cannot occur.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// A numeric estimator could not be evaluated on the given samples.
    #[error("estimation failed: {0}")]
    Estimation(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
