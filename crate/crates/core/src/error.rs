use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("index ({i}, {j}) out of range for order {n}")]
    InvalidIndex { n: usize, i: usize, j: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exhaustive enumeration would exceed its term budget.
    #[error("enumeration of {terms} terms for {what} exceeds the budget of {budget}")]
    Budget {
        what: String,
        terms: u128,
        budget: u128,
    },

    #[error("diagnostic error: {0}")]
    Diagnostic(String),

    #[error("kernel singularity: {0}")]
    Singularity(String),

    #[error("eigensolver did not converge: {0}")]
    NotConverged(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
