use thiserror::Error;

pub type Result<T> = std::result::Result<T, AbwError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbwError {
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NonSymmetric { asymmetry: f64 },

    #[error("matrix is indefinite (smallest eigenvalue {min_eigenvalue:e})")]
    IndefiniteInput { min_eigenvalue: f64 },

    #[error("matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch in {what}: {left} vs {right}")]
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix size {n} is not a multiple of the step dimension {d}")]
    DimensionNotMultiple { n: usize, d: usize },

    #[error("{significant} significant eigenvalues exceed the rank cap {cap}")]
    RankExceeded { significant: usize, cap: usize },

    #[error("time index {index} out of range for T = {steps}")]
    IndexOutOfRange { index: usize, steps: usize },

    #[error("factor has a nonzero entry {value:e} above the block diagonal at ({row}, {col})")]
    NotBlockLower { row: usize, col: usize, value: f64 },

    #[error("block {index} is not orthogonal (deviation {deviation:e})")]
    NotOrthogonal { index: usize, deviation: f64 },

    #[error("volatility sigma[{index}] = {value} must be positive")]
    NonPositiveSigma { index: usize, value: f64 },

    #[error("field `{field}`: {message}")]
    Format { field: String, message: String },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("covariance {index} is numerically singular (smallest eigenvalue {min_eigenvalue:e})")]
    SingularInput { index: usize, min_eigenvalue: f64 },

    #[error("operation requires d = 1, got d = {d}")]
    DimensionNotScalar { d: usize },

    #[error("sign enumeration supports at most {max} processes, got {n}")]
    TooManyProcesses { n: usize, max: usize },
}
