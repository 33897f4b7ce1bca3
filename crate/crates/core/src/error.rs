use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("leg mismatch: legs {legs:?} multiply to {product}, expected order {order}")]
    LegMismatch {
        legs: Vec<usize>,
        product: usize,
        order: usize,
    },
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("split ({n}, {k}) does not factor order {order}")]
    SplitMismatch { n: usize, k: usize, order: usize },
    #[error("leg index {leg} out of range for {count} legs")]
    BadLeg { leg: usize, count: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is not a complex Hadamard matrix: {0}")]
    NotHadamard(String),
    #[error("matrix is not a permutation matrix")]
    NotPermutation,
    #[error("matrix is not a diagonal unitary")]
    NotDiagonalUnitary,
    #[error("equivalence search refused: order {order} exceeds limit {limit}")]
    SearchRefused { order: usize, limit: usize },
    #[error("size budget exceeded: ambient order {order} > budget {budget}")]
    BudgetExceeded { order: usize, budget: usize },
    #[error("tower level {level} exceeds configured maximum {max}")]
    LevelTooDeep { level: usize, max: usize },
    #[error("algebra span did not stabilize after {rounds} rounds")]
    NoStabilization { rounds: usize },
    #[error("ambient mismatch between algebras: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("malformed matrix file: {0}")]
    Malformed(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable short code for each failure class, used by the matrix file reader.
    pub fn code(&self) -> &'static str {
        match self {
            Error::LegMismatch { .. } => "leg-mismatch",
            Error::OrderMismatch { .. } => "order-mismatch",
            Error::SplitMismatch { .. } => "split-mismatch",
            Error::BadLeg { .. } => "bad-leg",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NotUnitary { .. } => "not-unitary",
            Error::NotHadamard(_) => "not-hadamard",
            Error::NotPermutation => "not-permutation",
            Error::NotDiagonalUnitary => "not-diagonal-unitary",
            Error::SearchRefused { .. } => "search-refused",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::LevelTooDeep { .. } => "level-too-deep",
            Error::NoStabilization { .. } => "no-stabilization",
            Error::AmbientMismatch { .. } => "ambient-mismatch",
            Error::NotSquare { .. } => "non-square",
            Error::Malformed(_) => "malformed",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
