use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("quadrature did not converge (estimated error {estimate:.3e}): {context}")]
    Accuracy { estimate: f64, context: String },

    #[error("degenerate incidence: {0}")]
    DegenerateIncidence(String),

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
