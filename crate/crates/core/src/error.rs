use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was called in a state its contract forbids.
    #[error("contract violation: {0}")]
    ContractViolation(&'static str),

    #[error("infeasible budget: per-token {per_token} cannot be composed even once within total {total}")]
    InfeasibleBudget { per_token: String, total: String },

    #[error("privacy budget exhausted")]
    BudgetExhausted,

    #[error("insufficient corpus: need {needed} documents, corpus has {available}")]
    InsufficientCorpus { needed: usize, available: usize },

    #[error("context overflow: prompt needs {needed} words, window is {window}")]
    ContextOverflow { needed: usize, window: usize },

    #[error("backend error (status {status:?}): {message}")]
    Backend { status: Option<u16>, message: String },

    #[error("example {id}: {source}")]
    Example {
        id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
