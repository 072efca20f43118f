//! Normalized state vectors and exact unitary evolution.

use super::error::{HilbertError, Result};
use super::lattice::LatticeSpec;
use super::projectors::hermitian_eigen;
use super::{hermiticity_defect, Operator, StateVector};
use crate::scalar::{creal, max_abs, phase, Complex, Real};
use nalgebra::DVector;

/// Pure state in the particle-major, site-minor product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: StateVector<T>,
}

impl<T: Real> PureState<T> {
    /// Wraps amplitudes whose norm is already 1 (within 1e-12).
    pub fn new(amplitudes: StateVector<T>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > T::tol(1e-12) {
            return Err(HilbertError::NotNormalized(norm.as_f64()));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: StateVector<T>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == T::zero() {
            return Err(HilbertError::NotNormalized(0.0));
        }
        Ok(Self { amplitudes: amplitudes.unscale(norm) })
    }

    /// Basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = StateVector::zeros(dim);
        v[index] = creal(T::one());
        Self { amplitudes: v }
    }

    /// N-fold product `|phi> (x) ... (x) |phi>` of a one-particle state.
    pub fn product(one_particle: &[Complex<T>], num_particles: usize) -> Result<Self> {
        let single = DVector::from_column_slice(one_particle);
        let single = Self::normalized(single)?;
        let mut v = single.amplitudes.clone();
        for _ in 1..num_particles {
            v = v.kronecker(&single.amplitudes);
        }
        Self::normalized(v)
    }

    /// Product state for the lattice, checking the one-particle length.
    pub fn product_on(spec: &LatticeSpec<T>, one_particle: &[Complex<T>]) -> Result<Self> {
        spec.validate()?;
        if one_particle.len() != spec.num_sites {
            return Err(HilbertError::DimensionMismatch { expected: spec.num_sites, got: one_particle.len() });
        }
        Self::product(one_particle, spec.num_particles)
    }

    pub fn amplitudes(&self) -> &StateVector<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> StateVector<T> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `<psi|A|psi>` (real part; `A` is assumed Hermitian).
    pub fn expectation(&self, op: &Operator<T>) -> T {
        self.amplitudes.dotc(&(op * &self.amplitudes)).re
    }
}

/// Cached eigendecomposition of a Hamiltonian, used to apply
/// `exp(-i H t / hbar)` exactly for any `t`.
#[derive(Debug, Clone)]
pub struct Propagator<T: Real> {
    energies: Vec<T>,
    vectors: Operator<T>,
    hbar: T,
}

impl<T: Real> Propagator<T> {
    pub fn new(hamiltonian: &Operator<T>, hbar: T) -> Result<Self> {
        if hamiltonian.nrows() != hamiltonian.ncols() {
            return Err(HilbertError::DimensionMismatch { expected: hamiltonian.nrows(), got: hamiltonian.ncols() });
        }
        let defect = hermiticity_defect(hamiltonian);
        if defect > 1e-10 * (1.0 + max_abs(hamiltonian)) {
            return Err(HilbertError::NotHermitian(defect));
        }
        let (energies, vectors) = hermitian_eigen(hamiltonian);
        Ok(Self { energies, vectors, hbar })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    /// Eigenvector columns, ascending in energy.
    pub fn eigenvectors(&self) -> &Operator<T> {
        &self.vectors
    }

    /// `exp(-i H dt / hbar) v`. `dt == 0` returns `v` untouched.
    pub fn apply(&self, v: &StateVector<T>, dt: T) -> StateVector<T> {
        if dt == T::zero() {
            return v.clone();
        }
        let mut coeffs = self.vectors.ad_mul(v);
        for (c, &e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= phase(-e * dt / self.hbar);
        }
        &self.vectors * coeffs
    }

    /// The dense unitary `exp(-i H dt / hbar)`.
    pub fn unitary(&self, dt: T) -> Operator<T> {
        let n = self.dim();
        let phases = DVector::from_iterator(n, self.energies.iter().map(|&e| phase(-e * dt / self.hbar)));
        let scaled = Operator::from_fn(n, n, |r, c| self.vectors[(r, c)] * phases[c]);
        scaled * self.vectors.adjoint()
    }

    pub fn evolve(&self, state: &PureState<T>, dt: T) -> Result<PureState<T>> {
        if state.dim() != self.dim() {
            return Err(HilbertError::DimensionMismatch { expected: self.dim(), got: state.dim() });
        }
        Ok(PureState { amplitudes: self.apply(&state.amplitudes, dt) })
    }
}

/// One-shot evolution by `exp(-i H dt / hbar)`.
pub fn evolve<T: Real>(state: &PureState<T>, hamiltonian: &Operator<T>, dt: T, hbar: T) -> Result<PureState<T>> {
    Propagator::new(hamiltonian, hbar)?.evolve(state, dt)
}
