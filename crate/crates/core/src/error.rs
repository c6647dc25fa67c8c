use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NfgError {
    #[error("mode count must be at least 1")]
    ZeroModes,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("phase-space dimension {0} is odd")]
    OddDimension(usize),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),
    #[error("unphysical covariance matrix (smallest symplectic eigenvalue {min_nu})")]
    Unphysical { min_nu: f64 },
    #[error("matrix is not symplectic (max deviation {0:e})")]
    NotSymplectic(f64),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid standard-form parameters: {0}")]
    InvalidStandardForm(String),
    #[error("covariance matrix is not in standard form")]
    NotStandardForm,
    #[error("invalid Gaussian channel: {0}")]
    InvalidChannel(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, NfgError>;
