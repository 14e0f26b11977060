use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("csv: {0}")]
    Csv(String),

    #[error("row {row}, column {column:?}: cannot parse {value:?} as a finite number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),

    #[error("column {0} has an empty name")]
    EmptyColumnName(usize),

    #[error("need at least 2 samples, found {0}")]
    TooFewSamples(usize),

    #[error("need at least 2 columns, found {0}")]
    TooFewColumns(usize),

    #[error("column {column} is not a permutation of 1..={len}")]
    NotAPermutation { column: usize, len: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point coordinate {index} = {value} lies outside {domain}")]
    OutOfDomain {
        index: usize,
        value: f64,
        domain: &'static str,
    },

    #[error("lattice order {order} outside {min}..={max}")]
    LatticeOrder {
        order: usize,
        min: usize,
        max: usize,
    },

    #[error("lattice with {cells} cells exceeds the dense-grid limit of {limit}")]
    GridTooLarge { cells: u128, limit: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("correlation matrix is not positive definite (Cholesky factorisation failed)")]
    NotPositiveDefinite,

    #[error("column {0:?} is degenerate (zero variance)")]
    DegenerateColumn(String),

    #[error("weight matrix: {0}")]
    InvalidWeights(String),

    #[error("total dependence weight is zero")]
    ZeroTotalWeight,

    #[error("synthetic spec: {0}")]
    SynthSpec(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
