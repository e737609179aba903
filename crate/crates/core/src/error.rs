use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{n} qubits exceeds the supported maximum of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("matrix logarithm branch cut violated by eigenvalues {eigenvalues:?}")]
    BranchCut { eigenvalues: Vec<Complex64> },

    #[error("matrix is not diagonalizable to working precision ({0})")]
    NotDiagonalizable(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("operator does not commute with the spin parity (residual {residual:.3e})")]
    ParityOdd { residual: f64 },

    #[error("trace convention failure: {0}")]
    Convention(String),

    #[error("identity violated: {0}")]
    Consistency(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
