use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient dimension {0} exceeds the 64-coordinate limit")]
    TooWide(usize),

    #[error("invalid bit string {0:?}")]
    BadBitString(String),

    #[error("cannot sum an empty list of subspaces")]
    EmptySum,

    #[error("search space of {count} items exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },

    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid storage code: {}", .0.join("; "))]
    InvalidCode(Vec<String>),

    #[error("invalid repair plan: {}", .0.join("; "))]
    InvalidPlan(Vec<String>),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("declared parameters disagree with the code: {0}")]
    DeclaredMismatch(String),
}
