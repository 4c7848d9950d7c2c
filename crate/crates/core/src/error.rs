use thiserror::Error;

/// Errors raised by the simulation and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to reach its accuracy target.
    #[error("accuracy error in {routine}: {detail}")]
    Accuracy { routine: &'static str, detail: String },

    /// The request is too large for an enumerative path.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// No evaluator of the requested kind exists for this input.
    #[error("not available: {0}")]
    NotAvailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
