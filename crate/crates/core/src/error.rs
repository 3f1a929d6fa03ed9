use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix data has length {len}, expected {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: entries ({i}, {j}) and ({j}, {i}) differ")]
    NotSymmetric { i: usize, j: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index ({i}, {j}) out of range for a matrix of order {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("no off-diagonal: matrix order {0} is below 2")]
    NoOffDiagonal(usize),
    #[error("invalid block pair ({i}, {j}) for a partition with {count} blocks")]
    InvalidBlockPair { i: usize, j: usize, count: usize },
    #[error("invalid block size {b} for order {n}: {reason}")]
    InvalidBlockSize { n: usize, b: usize, reason: &'static str },
    #[error("rank deficient: pivot column {0} is numerically zero")]
    RankDeficient(usize),
    #[error("transpose input first: one-sided Jacobi needs rows >= cols, got {rows}x{cols}")]
    TransposeFirst { rows: usize, cols: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown ordering {0:?}")]
    UnknownOrdering(String),
    #[error("unknown complexity model {0:?}")]
    UnknownModel(String),
    #[error("eigenvalue collision in the block reduction")]
    EigenvalueCollision,
    #[error("reference eigensolver failed to converge")]
    ReferenceNoConvergence,
}
