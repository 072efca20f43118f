//! Classical phase-space ensembles with short-range pair correlations.
//!
//! Number-density fluctuations in a box window are estimated two ways: by
//! Monte Carlo over sampled configurations and by deterministic quadrature
//! of the connected pair density.

mod distribution;
mod error;
mod kernel;
mod moments;
mod quadrature;
mod sampler;
mod scan;
mod window;

pub use distribution::{OneParticleDistribution, Shape};
pub use error::{PhaseSpaceError, Result};
pub use kernel::{KernelShape, PairCorrelationModel};
pub use moments::{density_moments, moments_of_counts, window_counts, DensityMoments, JACKKNIFE_BLOCKS};
pub use quadrature::{
    gauss_legendre, normalization_defect, variance_ratio_quadrature, QuadratureFlag, QuadratureOptions, QuadratureResult,
};
pub use sampler::{periodic_distance, sample_ensemble, CorrelatedEnsemble, SamplerMeta, SamplerOptions};
pub use scan::{scaling_scan, ScanConfig, ScanResult, ScanRow, ScanVariable};
pub use window::WindowRegion;
