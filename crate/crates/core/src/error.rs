use thiserror::Error;

/// Errors produced by the matching library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{op}: dimension {n} exceeds the limit of {max}")]
    DimensionTooLarge {
        op: &'static str,
        n: usize,
        max: usize,
    },

    #[error("index ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("shape mismatch: expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("determinant is zero")]
    ZeroDeterminant,

    #[error("negative weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: i64 },

    #[error("weight {value} at ({row}, {col}) lies outside [1, {k}]")]
    WeightOutOfRange {
        row: usize,
        col: usize,
        value: i64,
        k: u64,
    },

    #[error("value {value} lies outside [0, {s})")]
    ValueOutOfRange { value: u64, s: u64 },

    #[error("range bound must be at least 1")]
    EmptyRange,

    #[error("({row}, {col}) is not an edge")]
    NotAnEdge { row: usize, col: usize },

    #[error("edge index {index} out of range for {edges} edges")]
    InvalidEdgeIndex { index: usize, edges: usize },

    #[error("graph has a perfect matching")]
    HasPerfectMatching,

    #[error("assignment is not in the zero set")]
    NotInZeroSet,

    #[error("dummy assignment is not in the bad set")]
    DummyNotBad,

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("enumeration of {needed} elements exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
