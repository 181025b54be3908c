use thiserror::Error;

pub type Result<T, E = GasketError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GasketError {
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("insufficient data: {usable} usable points, need at least {required}")]
    InsufficientData { usable: usize, required: usize },

    #[error("factorization broke down at shift {shift} after {attempts} attempts")]
    FactorizationBreakdown { shift: f64, attempts: usize },
}
