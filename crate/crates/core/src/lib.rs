//! Coarse-grained local densities of many-particle systems: exact lattice
//! decoherence functionals, Gaussian harmonic chains, phase-space Monte Carlo
//! for pair-correlated ensembles, and diffusion of Brownian product states.
//!
//! The lattice, chain and Brownian engines are generic over [`scalar::Real`]
//! (`f32` or `f64`). The Monte Carlo engine works in `f64`. The aliases below
//! fix the double-precision instantiation most callers want.

pub mod brownian_diffusion;
pub mod exact_hilbert;
pub mod gaussian_chain;
pub mod phase_space_mc;
pub mod rng;
pub mod scalar;
pub mod stats;

pub type LatticeSpec = exact_hilbert::LatticeSpec<f64>;
pub type PureState = exact_hilbert::PureState<f64>;
pub type Operator = exact_hilbert::Operator<f64>;
pub type ProjectorFamily = exact_hilbert::ProjectorFamily<f64>;
pub type HistorySchedule = exact_hilbert::HistorySchedule<f64>;
pub type DecoherenceMatrix = exact_hilbert::DecoherenceMatrix<f64>;
pub type Propagator = exact_hilbert::Propagator<f64>;

pub type ChainSpec = gaussian_chain::ChainSpec<f64>;
pub type GaussianState = gaussian_chain::GaussianState<f64>;

pub type BrownianParams = brownian_diffusion::BrownianParams<f64>;
pub type OneParticleGaussian = brownian_diffusion::OneParticleGaussian<f64>;

/// Single-precision instantiations.
pub mod single {
    pub type LatticeSpec = crate::exact_hilbert::LatticeSpec<f32>;
    pub type PureState = crate::exact_hilbert::PureState<f32>;
    pub type Propagator = crate::exact_hilbert::Propagator<f32>;
    pub type ChainSpec = crate::gaussian_chain::ChainSpec<f32>;
    pub type GaussianState = crate::gaussian_chain::GaussianState<f32>;
    pub type BrownianParams = crate::brownian_diffusion::BrownianParams<f32>;
    pub type OneParticleGaussian = crate::brownian_diffusion::OneParticleGaussian<f32>;
}
