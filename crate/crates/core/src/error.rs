use thiserror::Error;

/// Errors raised by the simulator, the unitary constructors and the training loop.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("wiring error: {0}")]
    Wiring(String),

    #[error("matrix is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max |H - H†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("expected {expected} parameters, got {actual}")]
    ParamCount { expected: usize, actual: usize },

    #[error("invalid Pauli string: {0}")]
    Pauli(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value{}", match index { Some(i) => format!(" when shifting parameter {i}"), None => " in cost or parameters".into() })]
    NonFinite { index: Option<usize> },

    #[error("training diverged at iteration {iteration} (cost {cost:e})")]
    Diverged { iteration: usize, cost: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
