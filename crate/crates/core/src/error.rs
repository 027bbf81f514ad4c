use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("agent {index} cannot be reached by the relay chain")]
    Unreachable { index: usize },
    #[error("leaves without an agent: {}", .0.join(", "))]
    LeafWithoutAgent(Vec<String>),
    #[error("agent {agent} exceeds the budget at time {time}")]
    BudgetExceeded { agent: usize, time: Scalar },
    #[error("agent {agent}: {reason}")]
    Discontinuous { agent: usize, reason: String },
    #[error("move leaves the network: {0}")]
    OffNetwork(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
