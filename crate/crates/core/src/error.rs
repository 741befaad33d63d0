use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("root finder did not converge after {iterations} iterations ({} partial roots)", partial.len())]
    RootsNotConverged { iterations: usize, partial: Vec<(Complex64, usize)> },

    #[error("quadrature failed: estimate {estimate}, error bound {error_bound:e} above tolerance {tol:e}")]
    Quadrature { estimate: Complex64, error_bound: f64, tol: f64 },

    #[error("matrix is not positive definite: pivot {pivot} has value {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("rank deficiency: expected dimension {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("total weight mismatch: expected {expected}, found {found}")]
    WeightMismatch { expected: i64, found: i64 },

    #[error("period computation failed: {0}")]
    Periods(String),

    #[error("theta calibration failed: {0}")]
    Calibration(String),

    #[error("evaluation at a pole: {0}")]
    Pole(String),
}

pub type Result<T> = std::result::Result<T, Error>;
