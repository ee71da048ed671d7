use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested combination of family and method is not available.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative routine or quadrature failed to meet its tolerance.
    #[error("no convergence in {routine}: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    /// A simulation ran past its configured work limit.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
