//! Exact finite-dimensional engine for N distinguishable particles on a 1-D
//! lattice.
//!
//! Builds the microscopic Hamiltonian and the smeared number, momentum and
//! energy densities, evolves pure states by exact eigendecomposition and
//! evaluates multi-time decoherence functionals from spectral projectors.
//! Basis states are site configurations ordered particle-major, site-minor.

mod error;
pub mod density;
pub mod histories;
pub mod lattice;
pub mod peaking;
pub mod projectors;
pub mod state;
pub mod textio;

pub use density::{
    build_density_operator, lattice_wavenumber, number_density_diagonal, DensityKind, DensityOperator,
    DensityOperatorSpec, DensityWindow, PairAssignment, SiteWindow,
};
pub use error::{HilbertError, Result};
pub use histories::{
    branch_states, coarse_grain_partition, decoherence_functional, epsilon_decoherence, probability_sum_check,
    CellSumRule, DecoherenceMatrix, EpsilonReport, HistorySchedule, SumRuleReport, DEFAULT_HISTORY_CAP,
};
pub use lattice::{build_hamiltonian, Boundary, LatticeSpec, DEFAULT_DIMENSION_CAP};
pub use peaking::{
    conserved_superposition_experiment, moments, moments_diagonal, peaking_ratio, peaking_ratio_diagonal,
    total_translation, translation_cosine, ConservedExperiment, PeakingRatio,
};
pub use projectors::{edges_per_eigenvalue, spectral_projectors, uniform_edges, FamilyDefects, ProjectorFamily};
pub use state::{evolve, Propagator, PureState};

use crate::scalar::{modulus, Complex, Real};
use nalgebra::{DMatrix, DVector};

/// Dense complex operator on the `d^N`-dimensional Hilbert space.
pub type Operator<T> = DMatrix<Complex<T>>;
/// Raw amplitude vector.
pub type StateVector<T> = DVector<Complex<T>>;

/// `max |A - A^dagger|` over entries.
pub fn hermiticity_defect<T: Real>(op: &Operator<T>) -> f64 {
    let n = op.nrows();
    let mut m = 0.0f64;
    for r in 0..n {
        for c in r..n {
            m = m.max(modulus(op[(r, c)] - op[(c, r)].conj()).as_f64());
        }
    }
    m
}
