use thiserror::Error;

/// Errors raised while building or validating instances and tasks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("negative energy for agent {0}")]
    NegativeEnergy(usize),
    #[error("negative length for edge {0}")]
    NegativeLength(usize),
    #[error("positions must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("instance has no agents")]
    NoAgents,
    #[error("point is not in the instance: {0}")]
    BadPoint(String),
    #[error("unsupported for this instance kind: {0}")]
    Unsupported(String),
}

/// Errors raised by solvers and schedule generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("task is infeasible")]
    Infeasible,
    #[error("agent {0} is not a broadcast source")]
    NotASource(usize),
    #[error("instance too large: {0}")]
    TooLarge(String),
    /// A generated artifact failed its own consistency check. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
