use thiserror::Error;

/// Errors raised by the numerical kernels and model builders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: ‖H − H†‖ = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("Rényi order must be positive, got {0}")]
    NonPositiveOrder(f64),

    #[error("Rényi order M = 1 is a pole of this formula; use the Shannon limit")]
    OrderIsOne,

    #[error("diagram sum needs an integer order M ≥ 2, got {0}")]
    NonIntegerOrder(f64),

    #[error("generator has no unique steady state: {0}")]
    NoUniqueSteadyState(String),

    #[error("Bose occupation has a pole at zero frequency")]
    ZeroFrequency,

    #[error("inverse temperature must be finite and positive, got {0}")]
    InvalidTemperature(f64),

    #[error("invalid susceptibility: {0}")]
    InvalidSusceptibility(String),

    #[error("frequency {omega} outside tabulated range [{min}, {max}]")]
    OutOfTable { omega: f64, min: f64, max: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("coupling dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("event budget exceeded: duration × max rate = {0:.3e} > 1e6")]
    EventBudget(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
