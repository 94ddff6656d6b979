use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("({receiver}, {sender}) is not a directed link of the topology")]
    InvalidLink { receiver: usize, sender: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("value {0} outside [0, 1]")]
    Domain(f64),

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("grid of {cells} cells exceeds the budget of {budget}")]
    GridTooLarge { cells: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
