use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("element is not invertible: {0}")]
    Singular(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NonSymmetric { asymmetry: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("point outside the space: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("hypotheses hold but conclusion fails:\n{0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
