use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhaseSpaceError {
    #[error("invalid one-particle distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid correlation kernel: {0}")]
    InvalidKernel(String),
    #[error("kernel makes the pair density negative (1 + c = {0})")]
    NegativeDensity(f64),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("need at least 2 particles, got {0}")]
    TooFewParticles(usize),
    #[error("need at least 100 samples, got {0}")]
    TooFewSamples(usize),
    #[error("quadrature needs a uniform or separable one-particle density")]
    NotSeparable,
    #[error("scan needs at least 4 grid points, got {0}")]
    TooFewScanPoints(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = PhaseSpaceError> = std::result::Result<T, E>;
