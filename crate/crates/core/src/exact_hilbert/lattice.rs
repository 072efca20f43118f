//! Lattice discretization of N distinguishable particles and the microscopic
//! Hamiltonian `H = sum_j K_j + sum_{l>j} phi(q_j - q_l)`.

use super::error::{HilbertError, Result};
use super::Operator;
use crate::scalar::{creal, Complex, Real};
use nalgebra::DMatrix;

/// Default cap on `d^N`.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// N particles on `d` sites with spacing `a`.
///
/// `pair_potential[r]` is the pair energy at a separation of `r` sites. On a
/// periodic lattice `r` is the forward displacement modulo `d`, so symmetry
/// requires `phi[r] == phi[(d - r) % d]`; on an open lattice `r = |s_j - s_l|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec<T> {
    pub num_particles: usize,
    pub num_sites: usize,
    pub spacing: T,
    pub mass: T,
    /// Hopping energy `J`; [`LatticeSpec::new`] sets `hbar^2 / (2 m a^2)`.
    pub hopping: T,
    pub pair_potential: Vec<T>,
    pub boundary: Boundary,
    pub hbar: T,
    pub dimension_cap: usize,
}

impl<T: Real> LatticeSpec<T> {
    /// Periodic lattice, `hbar = 1`, no interaction, `J = hbar^2/(2 m a^2)`.
    pub fn new(num_particles: usize, num_sites: usize, spacing: T, mass: T) -> Self {
        let hbar = T::one();
        Self {
            num_particles,
            num_sites,
            spacing,
            mass,
            hopping: hbar * hbar / (T::lit(2.0) * mass * spacing * spacing),
            pair_potential: vec![T::zero(); num_sites],
            boundary: Boundary::Periodic,
            hbar,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    pub fn with_hopping(mut self, hopping: T) -> Self {
        self.hopping = hopping;
        self
    }

    /// Sets `hbar` and recomputes the hopping from the mass.
    pub fn with_hbar(mut self, hbar: T) -> Self {
        self.hbar = hbar;
        self.hopping = hbar * hbar / (T::lit(2.0) * self.mass * self.spacing * self.spacing);
        self
    }

    pub fn with_pair_potential(mut self, table: Vec<T>) -> Self {
        self.pair_potential = table;
        self
    }

    /// Pair potential from a function of the (non-negative) separation in
    /// lattice units; periodic lattices use the minimum-image distance.
    pub fn with_pair_function(mut self, f: impl Fn(usize) -> T) -> Self {
        let d = self.num_sites;
        self.pair_potential = (0..d)
            .map(|r| match self.boundary {
                Boundary::Periodic => f(r.min(d - r)),
                Boundary::Open => f(r),
            })
            .collect();
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_dimension_cap(mut self, cap: usize) -> Self {
        self.dimension_cap = cap;
        self
    }

    /// Checks the invariants and returns the Hilbert dimension `d^N`.
    pub fn validate(&self) -> Result<usize> {
        if self.num_particles == 0 || self.num_sites == 0 {
            return Err(HilbertError::InvalidLattice(
                "particle and site counts must be positive".into(),
            ));
        }
        if !(self.spacing > T::zero() && self.mass > T::zero() && self.hbar > T::zero()) {
            return Err(HilbertError::InvalidLattice(
                "spacing, mass and hbar must be positive".into(),
            ));
        }
        if self.hopping < T::zero() {
            return Err(HilbertError::InvalidLattice("hopping must be non-negative".into()));
        }
        if self.pair_potential.len() != self.num_sites {
            return Err(HilbertError::InvalidLattice(format!(
                "pair potential table has {} entries, expected {}",
                self.pair_potential.len(),
                self.num_sites
            )));
        }
        let dim = (self.num_sites as u128).checked_pow(self.num_particles as u32);
        let dim = match dim {
            Some(d) if d <= self.dimension_cap as u128 => d as usize,
            Some(d) => return Err(HilbertError::DimensionCap { dim: d, cap: self.dimension_cap }),
            None => return Err(HilbertError::DimensionCap { dim: u128::MAX, cap: self.dimension_cap }),
        };
        if self.boundary == Boundary::Periodic {
            let d = self.num_sites;
            for r in 1..d {
                let mirror = d - r;
                let (a, b) = (self.pair_potential[r], self.pair_potential[mirror]);
                if (a - b).abs() > T::tol(1e-12) * (T::one() + a.abs()) {
                    return Err(HilbertError::AsymmetricPotential {
                        r,
                        mirror,
                        a: a.as_f64(),
                        b: b.as_f64(),
                    });
                }
            }
        }
        Ok(dim)
    }

    pub fn dimension(&self) -> usize {
        self.num_sites.pow(self.num_particles as u32)
    }

    /// Basis stride of particle `j` (particle-major, site-minor ordering).
    #[inline]
    pub fn stride(&self, particle: usize) -> usize {
        self.num_sites.pow((self.num_particles - 1 - particle) as u32)
    }

    /// Basis index of a site configuration.
    pub fn encode(&self, sites: &[usize]) -> usize {
        sites.iter().fold(0, |acc, &s| acc * self.num_sites + s)
    }

    /// Writes the site of every particle for basis `index` into `out`.
    pub fn decode(&self, mut index: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = index % self.num_sites;
            index /= self.num_sites;
        }
    }

    /// Pair energy for particles at sites `sj` and `sl`.
    #[inline]
    pub fn pair_energy(&self, sj: usize, sl: usize) -> T {
        let d = self.num_sites;
        let r = match self.boundary {
            Boundary::Periodic => (sl + d - sj) % d,
            Boundary::Open => sj.abs_diff(sl),
        };
        self.pair_potential[r]
    }

    /// Position of site `s`.
    #[inline]
    pub fn position(&self, s: usize) -> T {
        T::from_usize_lossy(s) * self.spacing
    }

    /// Single-particle forward shift, `(S psi)(s) = psi(s + 1)`.
    pub fn shift(&self) -> DMatrix<Complex<T>> {
        let d = self.num_sites;
        let mut s = DMatrix::zeros(d, d);
        for site in 0..d {
            let next = site + 1;
            match self.boundary {
                Boundary::Periodic => s[(site, next % d)] += creal(T::one()),
                Boundary::Open if next < d => s[(site, next)] = creal(T::one()),
                Boundary::Open => {}
            }
        }
        s
    }

    /// Single-particle kinetic operator `-J (S + S^dagger) + 2 J`.
    pub fn kinetic_one_body(&self) -> DMatrix<Complex<T>> {
        let d = self.num_sites;
        let s = self.shift();
        let j = creal(self.hopping);
        let mut k = (&s + s.adjoint()) * (-j);
        for site in 0..d {
            k[(site, site)] += j * creal(T::lit(2.0));
        }
        k
    }

    /// Single-particle centered-difference momentum `(-i hbar / 2a)(S - S^dagger)`.
    pub fn momentum_one_body(&self) -> DMatrix<Complex<T>> {
        let s = self.shift();
        let coeff = Complex::new(T::zero(), -self.hbar / (T::lit(2.0) * self.spacing));
        (&s - s.adjoint()) * coeff
    }
}

/// `sum_j A_j` for a single-particle operator `A` acting on every particle.
pub fn one_body_sum<T: Real>(spec: &LatticeSpec<T>, one: &DMatrix<Complex<T>>) -> Operator<T> {
    let dim = spec.dimension();
    let d = spec.num_sites;
    let mut out = Operator::zeros(dim, dim);
    let mut sites = vec![0usize; spec.num_particles];
    for col in 0..dim {
        spec.decode(col, &mut sites);
        for (j, &s) in sites.iter().enumerate() {
            let stride = spec.stride(j);
            let base = col - s * stride;
            for s_new in 0..d {
                let a = one[(s_new, s)];
                if a != Complex::new(T::zero(), T::zero()) {
                    out[(base + s_new * stride, col)] += a;
                }
            }
        }
    }
    out
}

/// Diagonal interaction `sum_{l>j} phi(q_j - q_l)`.
pub fn interaction_diagonal<T: Real>(spec: &LatticeSpec<T>) -> Vec<T> {
    let dim = spec.dimension();
    let mut sites = vec![0usize; spec.num_particles];
    (0..dim)
        .map(|idx| {
            spec.decode(idx, &mut sites);
            let mut e = T::zero();
            for j in 0..sites.len() {
                for l in j + 1..sites.len() {
                    e += spec.pair_energy(sites[j], sites[l]);
                }
            }
            e
        })
        .collect()
}

/// Builds the microscopic Hamiltonian on the lattice.
pub fn build_hamiltonian<T: Real>(spec: &LatticeSpec<T>) -> Result<Operator<T>> {
    spec.validate()?;
    let mut h = one_body_sum(spec, &spec.kinetic_one_body());
    for (i, e) in interaction_diagonal(spec).into_iter().enumerate() {
        h[(i, i)] += creal(e);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_ring_single_particle() {
        let spec = LatticeSpec::<f64>::new(1, 2, 1.0, 1.0).with_hopping(1.0);
        let h = build_hamiltonian(&spec).unwrap();
        let expected = [[2.0, -2.0], [-2.0, 2.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(h[(r, c)], Complex::new(expected[r][c], 0.0));
            }
        }
    }

    #[test]
    fn on_site_interaction_only_on_doubly_occupied_states() {
        let u = 0.7;
        let spec = LatticeSpec::<f64>::new(2, 2, 1.0, 1.0)
            .with_hopping(0.0)
            .with_pair_potential(vec![u, 0.0]);
        let h = build_hamiltonian(&spec).unwrap();
        // basis: (0,0) (0,1) (1,0) (1,1)
        let diag: Vec<f64> = (0..4).map(|i| h[(i, i)].re).collect();
        assert_eq!(diag, vec![u, 0.0, 0.0, u]);
    }

    #[test]
    fn dimension_cap_rejected() {
        let spec = LatticeSpec::<f64>::new(9, 4, 1.0, 1.0);
        assert!(matches!(spec.validate(), Err(HilbertError::DimensionCap { .. })));
        let ok = spec.with_dimension_cap(1 << 18);
        assert_eq!(ok.validate().unwrap(), 1 << 18);
    }

    #[test]
    fn asymmetric_potential_rejected() {
        let spec = LatticeSpec::<f64>::new(2, 4, 1.0, 1.0).with_pair_potential(vec![0.0, 1.0, 0.0, 0.5]);
        assert!(matches!(
            build_hamiltonian(&spec),
            Err(HilbertError::AsymmetricPotential { .. })
        ));
    }

    #[test]
    fn hopping_from_mass() {
        let spec = LatticeSpec::<f64>::new(1, 4, 0.5, 2.0).with_hbar(1.5);
        assert!((spec.hopping - 1.5 * 1.5 / (2.0 * 2.0 * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn encode_decode_roundtrip() {
        let spec = LatticeSpec::<f64>::new(3, 5, 1.0, 1.0);
        let mut buf = [0usize; 3];
        for idx in 0..spec.dimension() {
            spec.decode(idx, &mut buf);
            assert_eq!(spec.encode(&buf), idx);
        }
        assert_eq!(spec.encode(&[1, 0, 0]), 25);
    }
}
