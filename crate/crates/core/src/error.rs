use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments, dimensions or distribution parameters.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("{count} supports exceed the exhaustive limit of {limit}; use the monte-carlo estimator")]
    TooLarge { count: u128, limit: u128 },

    /// A closed-form bound whose denominator is not positive.
    #[error("degenerate bound: {0}")]
    Singular(String),

    /// The affine projection onto {x : Φx = y} cannot be formed reliably.
    #[error("infeasible projection: {0}")]
    RankDeficient(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Errors caused by the caller's input rather than by a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::TooLarge { .. }
                | Error::Singular(_)
                | Error::Format(_)
                | Error::Config(_)
        )
    }
}
