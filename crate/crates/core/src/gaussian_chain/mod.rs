//! Gaussian states of a harmonic oscillator chain.
//!
//! First and second moments evolve in closed form through the symplectic
//! propagator of the quadratic Hamiltonian; the number density `n(k)` has
//! exact Gaussian mean and variance.

mod chain;
mod correlation;
mod density;
mod error;
mod state;

pub use chain::{ChainSpec, NormalModes, Symplectic};
pub use correlation::{correlation_length, correlation_profile, CorrelationFit, CorrelationFlag};
pub use density::{char_one_mode, k_scan, n_k_moments, small_k_ratio, write_scan_csv, NkMoments, ScanRow};
pub use error::{GaussianError, Result};
pub use state::{evolve_gaussian, GaussianState, UNCERTAINTY_TOLERANCE};
