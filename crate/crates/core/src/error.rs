use thiserror::Error;

use crate::solver::SolveResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),

    #[error("solution is not encodable: {0}")]
    NotEncodable(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("instance too large for the exact solver: {0}")]
    TooLarge(String),

    /// The exact search ran out of nodes. `best` is the incumbent found so
    /// far; it is not proven optimal.
    #[error("exact search exceeded its node budget of {budget}")]
    BudgetExceeded { budget: u64, best: Box<SolveResult> },
}
