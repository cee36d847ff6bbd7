use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid qubit selection: {0}")]
    QubitSelection(String),

    #[error("qubit count {0} out of range (supported 2..={max})", max = crate::states::MAX_QUBITS)]
    QubitCount(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("channel effect mismatch: expected {expected}, config has {found}")]
    EffectMismatch { expected: &'static str, found: &'static str },

    #[error("eigenvalue iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("invalid bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
