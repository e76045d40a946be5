use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("problem must have at least one variable")]
    Empty,
    #[error("coefficient magnitude sum {sum} exceeds the safe objective bound {bound}")]
    MagnitudeOverflow { sum: i128, bound: i128 },
    #[error("duplicate variable index {0} in subset")]
    DuplicateIndex(usize),
    #[error("subproblem of size {size} exceeds backend capacity {limit}")]
    Capacity { size: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
