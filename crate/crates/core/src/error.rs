use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid matrix shape: {0}")]
    InvalidShape(String),
    #[error("matrix is not Hermitian (max deviation {deviation:e} > tol {tol:e})")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("not a density matrix: {0}")]
    InvalidState(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystem(String),
    #[error("invalid zero-discord decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid correction gate: {0}")]
    InvalidGate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
