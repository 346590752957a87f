use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("component count mismatch: expected {expected}, found {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("field length mismatch: expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("coupling matrix is not symmetric (g[{row}][{col}] != g[{col}][{row}])")]
    AsymmetricCoupling { row: usize, col: usize },

    #[error("invalid scheme: {0}")]
    Scheme(String),

    #[error("non-finite state after step {step} (max |psi| before failure = {max_amplitude:e})")]
    NonFinite { step: usize, max_amplitude: f64 },

    #[error("oracle: {0}")]
    Oracle(String),

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
