use super::error::{GaussianError, Result};
use crate::exact_hilbert::Boundary;
use crate::scalar::Real;
use nalgebra::{DMatrix, DVector};

/// Harmonic chain `H = sum p_j^2 / 2m + 1/2 u^T K u` with displacements
/// `u_j = q_j - xbar_j` and `K = m w0^2 I + kappa * Laplacian`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec<T> {
    pub num_modes: usize,
    pub mass: T,
    pub omega0: T,
    pub coupling: T,
    pub equilibrium: Vec<T>,
    pub boundary: Boundary,
    pub hbar: T,
}

impl<T: Real> ChainSpec<T> {
    /// Evenly spaced chain `xbar_j = j * spacing`, unit `hbar`.
    pub fn uniform(num_modes: usize, mass: T, omega0: T, coupling: T, spacing: T) -> Self {
        Self {
            num_modes,
            mass,
            omega0,
            coupling,
            equilibrium: (0..num_modes).map(|j| T::from_usize_lossy(j) * spacing).collect(),
            boundary: Boundary::Periodic,
            hbar: T::one(),
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_hbar(mut self, hbar: T) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.num_modes;
        if m == 0 {
            return Err(GaussianError::InvalidChain("num_modes must be positive".into()));
        }
        if self.equilibrium.len() != m {
            return Err(GaussianError::DimensionMismatch { expected: m, got: self.equilibrium.len() });
        }
        let bad = |x: T| !x.is_finite();
        if bad(self.mass) || self.mass <= T::zero() {
            return Err(GaussianError::InvalidChain("mass must be positive".into()));
        }
        if bad(self.omega0) || self.omega0 < T::zero() {
            return Err(GaussianError::InvalidChain("omega0 must be nonnegative".into()));
        }
        if bad(self.coupling) || self.coupling < T::zero() {
            return Err(GaussianError::InvalidChain("coupling must be nonnegative".into()));
        }
        if bad(self.hbar) || self.hbar <= T::zero() {
            return Err(GaussianError::InvalidChain("hbar must be positive".into()));
        }
        Ok(())
    }

    /// Dynamical (stiffness) matrix `K`.
    pub fn stiffness(&self) -> DMatrix<T> {
        let m = self.num_modes;
        let mut k = DMatrix::identity(m, m) * (self.mass * self.omega0 * self.omega0);
        let mut bond = |a: usize, b: usize| {
            k[(a, a)] += self.coupling;
            k[(b, b)] += self.coupling;
            k[(a, b)] -= self.coupling;
            k[(b, a)] -= self.coupling;
        };
        for j in 0..m.saturating_sub(1) {
            bond(j, j + 1);
        }
        if self.boundary == Boundary::Periodic && m > 2 {
            bond(m - 1, 0);
        }
        k
    }

    pub fn normal_modes(&self) -> Result<NormalModes<T>> {
        self.validate()?;
        let k = self.stiffness();
        let eig = k.symmetric_eigen();
        let scale = eig.eigenvalues.iter().fold(T::one(), |a, &b| a.max(b.abs()));
        let tol = scale * T::tol(1e-12);
        let mut min = T::zero();
        let omegas = eig
            .eigenvalues
            .iter()
            .map(|&l| {
                min = min.min(l);
                if l.abs() <= tol {
                    T::zero()
                } else {
                    (l.max(T::zero()) / self.mass).sqrt()
                }
            })
            .collect::<Vec<_>>();
        if min < -tol {
            return Err(GaussianError::Indefinite(min.as_f64()));
        }
        Ok(NormalModes { omegas: DVector::from_vec(omegas), vectors: eig.eigenvectors, mass: self.mass })
    }
}

/// Orthonormal eigenvectors of `K` (columns) and mode frequencies.
#[derive(Debug, Clone)]
pub struct NormalModes<T: Real> {
    pub omegas: DVector<T>,
    pub vectors: DMatrix<T>,
    pub mass: T,
}

/// Linear phase-space map `z -> S z` on `(u, p)`.
#[derive(Debug, Clone)]
pub struct Symplectic<T: Real>(pub DMatrix<T>);

impl<T: Real> NormalModes<T> {
    /// Propagator `S(t)` in the `(u_1..u_M, p_1..p_M)` ordering.
    pub fn propagator(&self, t: T) -> Symplectic<T> {
        let m = self.omegas.len();
        let (mut c, mut sq, mut sp) = (DVector::zeros(m), DVector::zeros(m), DVector::zeros(m));
        for (n, &w) in self.omegas.iter().enumerate() {
            if w == T::zero() {
                c[n] = T::one();
                sq[n] = t / self.mass;
                sp[n] = T::zero();
            } else {
                let (s, co) = (w * t).sin_cos();
                c[n] = co;
                sq[n] = s / (self.mass * w);
                sp[n] = -self.mass * w * s;
            }
        }
        let o = &self.vectors;
        let rot = |d: &DVector<T>| o * DMatrix::from_diagonal(d) * o.transpose();
        let mut s = DMatrix::zeros(2 * m, 2 * m);
        let cc = rot(&c);
        s.view_mut((0, 0), (m, m)).copy_from(&cc);
        s.view_mut((0, m), (m, m)).copy_from(&rot(&sq));
        s.view_mut((m, 0), (m, m)).copy_from(&rot(&sp));
        s.view_mut((m, m), (m, m)).copy_from(&cc);
        Symplectic(s)
    }
}

/// Standard symplectic form `[[0, I], [-I, 0]]`.
pub(crate) fn symplectic_form<T: Real>(m: usize) -> DMatrix<T> {
    let mut w = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        w[(j, m + j)] = T::one();
        w[(m + j, j)] = -T::one();
    }
    w
}
