use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("dynamical matrix is indefinite (smallest eigenvalue {0:e})")]
    Indefinite(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("covariance is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("covariance violates the uncertainty principle (smallest eigenvalue {0:e})")]
    Uncertainty(f64),
    #[error("chain has a zero-frequency mode; no normalizable ground state")]
    ZeroMode,
    #[error("center-of-mass variance vanishes; small-k ratio undefined")]
    ZeroCenterOfMass,
    #[error("wavenumber must be nonzero")]
    ZeroWavenumber,
    #[error("correlation fit needs at least 4 modes, got {0}")]
    TooFewModes(usize),
    #[error("evolution time must be finite")]
    BadTime,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = GaussianError> = std::result::Result<T, E>;
