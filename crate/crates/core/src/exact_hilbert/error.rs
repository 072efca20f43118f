use thiserror::Error;

#[derive(Debug, Error)]
pub enum HilbertError {
    #[error("Hilbert dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: u128, cap: usize },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("pair potential is not symmetric: phi[{r}] = {a} but phi[{mirror}] = {b}")]
    AsymmetricPotential { r: usize, mirror: usize, a: f64, b: f64 },
    #[error("density window is empty")]
    EmptyWindow,
    #[error("window sites {0:?} are not contiguous on the lattice")]
    NonContiguousWindow(Vec<usize>),
    #[error("site {site} is outside a lattice of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("wavenumber {k} is not lattice commensurate (k d a / 2pi = {mode})")]
    IncommensurateWavenumber { k: f64, mode: f64 },
    #[error("density kind {kind} needs a {expected} window")]
    WindowKindMismatch { kind: &'static str, expected: &'static str },
    #[error("bin edges must be strictly increasing with at least two entries")]
    BadBinEdges,
    #[error("eigenvalue {value} lies outside all bins [{lo}, {hi}]")]
    EigenvalueOutsideBins { value: f64, lo: f64, hi: f64 },
    #[error("operator is not Hermitian (max |A - A^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("history times must be strictly increasing and finite")]
    NonIncreasingTimes,
    #[error("schedule has {times} times but {families} projector families")]
    ScheduleMismatch { times: usize, families: usize },
    #[error("{count} history strings exceed the cap {cap}")]
    HistoryCap { count: u128, cap: usize },
    #[error("partition does not cover every history string exactly once: {0}")]
    BadPartition(String),
    #[error("precondition failed: {what} (violation {norm:e})")]
    Precondition { what: String, norm: f64 },
    #[error("operator mean vanishes (variance {variance:e}); peaking ratio undefined")]
    ZeroMean { variance: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = HilbertError> = std::result::Result<T, E>;
