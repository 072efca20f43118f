//! Smeared local densities on the lattice: number, momentum, energy and the
//! Fourier-mode number density.

use super::error::{HilbertError, Result};
use super::lattice::{one_body_sum, Boundary, LatticeSpec};
use super::Operator;
use crate::scalar::{creal, Complex, Real};
use nalgebra::{DMatrix, DVector};

/// A nonempty contiguous run of sites (wrapping allowed on periodic lattices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteWindow {
    sites: Vec<usize>,
}

impl SiteWindow {
    /// Validates an arbitrary site subset against the lattice.
    pub fn new(mut sites: Vec<usize>, num_sites: usize, boundary: Boundary) -> Result<Self> {
        sites.sort_unstable();
        sites.dedup();
        if sites.is_empty() {
            return Err(HilbertError::EmptyWindow);
        }
        if let Some(&s) = sites.iter().find(|&&s| s >= num_sites) {
            return Err(HilbertError::SiteOutOfRange { site: s, sites: num_sites });
        }
        let contiguous = match boundary {
            Boundary::Open => sites.windows(2).all(|w| w[1] == w[0] + 1),
            Boundary::Periodic => {
                let mut member = vec![false; num_sites];
                sites.iter().for_each(|&s| member[s] = true);
                // a run has exactly one exit point unless it covers the ring
                let exits = sites.iter().filter(|&&s| !member[(s + 1) % num_sites]).count();
                exits <= 1
            }
        };
        if !contiguous {
            return Err(HilbertError::NonContiguousWindow(sites));
        }
        Ok(Self { sites })
    }

    /// `len` sites starting at `start`, wrapping modulo `num_sites`.
    pub fn run(start: usize, len: usize, num_sites: usize, boundary: Boundary) -> Result<Self> {
        Self::new((start..start + len).map(|s| s % num_sites).collect(), num_sites, boundary)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Indicator `delta_V` over the sites of a lattice with `num_sites` sites.
    pub fn indicator(&self, num_sites: usize) -> Vec<bool> {
        let mut ind = vec![false; num_sites];
        self.sites.iter().for_each(|&s| ind[s] = true);
        ind
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    Number,
    Momentum,
    Energy,
    FourierNumber,
}

impl DensityKind {
    fn name(self) -> &'static str {
        match self {
            DensityKind::Number => "number",
            DensityKind::Momentum => "momentum",
            DensityKind::Energy => "energy",
            DensityKind::FourierNumber => "fourier_number",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityWindow<T> {
    Sites(SiteWindow),
    /// Wavenumber `k`; must equal `2 pi n / (d a)` for an integer `n`.
    Wavenumber(T),
}

/// Who receives the pair energy in the energy density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairAssignment {
    /// `sum_{l>j} phi(q_j - q_l) delta_V(q_j)`: the lower-index particle.
    #[default]
    LowerIndex,
    /// Half to each particle of the pair.
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperatorSpec<T> {
    pub kind: DensityKind,
    pub window: DensityWindow<T>,
    pub pair_assignment: PairAssignment,
}

impl<T: Real> DensityOperatorSpec<T> {
    pub fn number(window: SiteWindow) -> Self {
        Self { kind: DensityKind::Number, window: DensityWindow::Sites(window), pair_assignment: PairAssignment::LowerIndex }
    }

    pub fn momentum(window: SiteWindow) -> Self {
        Self { kind: DensityKind::Momentum, window: DensityWindow::Sites(window), pair_assignment: PairAssignment::LowerIndex }
    }

    pub fn energy(window: SiteWindow) -> Self {
        Self { kind: DensityKind::Energy, window: DensityWindow::Sites(window), pair_assignment: PairAssignment::LowerIndex }
    }

    pub fn fourier(k: T) -> Self {
        Self { kind: DensityKind::FourierNumber, window: DensityWindow::Wavenumber(k), pair_assignment: PairAssignment::LowerIndex }
    }

    /// Fourier density at the commensurate wavenumber `2 pi mode / (d a)`.
    pub fn fourier_mode(spec: &LatticeSpec<T>, mode: i64) -> Self {
        Self::fourier(lattice_wavenumber(spec, mode))
    }

    pub fn with_pair_assignment(mut self, pa: PairAssignment) -> Self {
        self.pair_assignment = pa;
        self
    }
}

/// `2 pi n / (d a)`.
pub fn lattice_wavenumber<T: Real>(spec: &LatticeSpec<T>, mode: i64) -> T {
    T::two_pi() * T::lit(mode as f64) / (T::from_usize_lossy(spec.num_sites) * spec.spacing)
}

/// Built operator: a single Hermitian matrix, or the Hermitian real and
/// imaginary parts of `n(k) = sum_j exp(i k q_j)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityOperator<T: Real> {
    Hermitian(Operator<T>),
    Fourier { re: Operator<T>, im: Operator<T> },
}

impl<T: Real> DensityOperator<T> {
    /// The Hermitian operator, or the real part of a Fourier density.
    pub fn primary(&self) -> &Operator<T> {
        match self {
            DensityOperator::Hermitian(op) => op,
            DensityOperator::Fourier { re, .. } => re,
        }
    }
}

fn sites_window<T: Real>(dspec: &DensityOperatorSpec<T>, spec: &LatticeSpec<T>) -> Result<Vec<bool>> {
    match &dspec.window {
        DensityWindow::Sites(w) => {
            // re-validate against this lattice
            let w = SiteWindow::new(w.sites().to_vec(), spec.num_sites, spec.boundary)?;
            Ok(w.indicator(spec.num_sites))
        }
        DensityWindow::Wavenumber(_) => Err(HilbertError::WindowKindMismatch {
            kind: dspec.kind.name(),
            expected: "site",
        }),
    }
}

/// Validates `k` and returns it.
pub fn check_commensurate<T: Real>(spec: &LatticeSpec<T>, k: T) -> Result<T> {
    let mode = k * T::from_usize_lossy(spec.num_sites) * spec.spacing / T::two_pi();
    if (mode - mode.round()).abs() > T::tol(1e-9) * (T::one() + mode.abs()) {
        return Err(HilbertError::IncommensurateWavenumber { k: k.as_f64(), mode: mode.as_f64() });
    }
    Ok(k)
}

fn anticommutator_half<T: Real>(a: &DMatrix<Complex<T>>, window: &[bool]) -> DMatrix<Complex<T>> {
    let d = window.len();
    let delta = DMatrix::from_fn(d, d, |r, c| {
        if r == c && window[r] {
            creal(T::one())
        } else {
            creal(T::zero())
        }
    });
    (a * &delta + &delta * a) * creal(T::lit(0.5))
}

/// Diagonal of `n_V` in the product basis; cheap for large `d^N`.
pub fn number_density_diagonal<T: Real>(spec: &LatticeSpec<T>, window: &SiteWindow) -> Result<DVector<T>> {
    spec.validate()?;
    let w = SiteWindow::new(window.sites().to_vec(), spec.num_sites, spec.boundary)?;
    let ind = w.indicator(spec.num_sites);
    let mut sites = vec![0usize; spec.num_particles];
    Ok(DVector::from_iterator(
        spec.dimension(),
        (0..spec.dimension()).map(|idx| {
            spec.decode(idx, &mut sites);
            T::from_usize_lossy(sites.iter().filter(|&&s| ind[s]).count())
        }),
    ))
}

/// Builds the requested smeared density operator.
pub fn build_density_operator<T: Real>(
    spec: &LatticeSpec<T>,
    dspec: &DensityOperatorSpec<T>,
) -> Result<DensityOperator<T>> {
    let dim = spec.validate()?;
    let d = spec.num_sites;
    match dspec.kind {
        DensityKind::Number => {
            let ind = sites_window(dspec, spec)?;
            let one = DMatrix::from_fn(d, d, |r, c| {
                creal(if r == c && ind[r] { T::one() } else { T::zero() })
            });
            Ok(DensityOperator::Hermitian(one_body_sum(spec, &one)))
        }
        DensityKind::Momentum => {
            let ind = sites_window(dspec, spec)?;
            let one = anticommutator_half(&spec.momentum_one_body(), &ind);
            Ok(DensityOperator::Hermitian(one_body_sum(spec, &one)))
        }
        DensityKind::Energy => {
            let ind = sites_window(dspec, spec)?;
            let one = anticommutator_half(&spec.kinetic_one_body(), &ind);
            let mut h = one_body_sum(spec, &one);
            let half = T::lit(0.5);
            let mut sites = vec![0usize; spec.num_particles];
            for idx in 0..dim {
                spec.decode(idx, &mut sites);
                let mut e = T::zero();
                for j in 0..sites.len() {
                    for l in j + 1..sites.len() {
                        let phi = spec.pair_energy(sites[j], sites[l]);
                        match dspec.pair_assignment {
                            PairAssignment::LowerIndex => {
                                if ind[sites[j]] {
                                    e += phi;
                                }
                            }
                            PairAssignment::Split => {
                                if ind[sites[j]] {
                                    e += half * phi;
                                }
                                if ind[sites[l]] {
                                    e += half * phi;
                                }
                            }
                        }
                    }
                }
                h[(idx, idx)] += creal(e);
            }
            Ok(DensityOperator::Hermitian(h))
        }
        DensityKind::FourierNumber => {
            let k = match dspec.window {
                DensityWindow::Wavenumber(k) => check_commensurate(spec, k)?,
                DensityWindow::Sites(_) => {
                    return Err(HilbertError::WindowKindMismatch {
                        kind: "fourier_number",
                        expected: "wavenumber",
                    })
                }
            };
            let mode = (k * T::from_usize_lossy(d) * spec.spacing / T::two_pi()).round();
            // cos/sin of 2 pi n s / d, reduced exactly so k = 0 gives exact ones
            let mode = mode.as_f64() as i64;
            let (cos, sin): (Vec<T>, Vec<T>) = (0..d)
                .map(|s| {
                    let m = (mode * s as i64).rem_euclid(d as i64) as usize;
                    if m == 0 {
                        (T::one(), T::zero())
                    } else {
                        let theta = T::two_pi() * T::from_usize_lossy(m) / T::from_usize_lossy(d);
                        (theta.cos(), theta.sin())
                    }
                })
                .unzip();
            let mut re = Operator::zeros(dim, dim);
            let mut im = Operator::zeros(dim, dim);
            let mut sites = vec![0usize; spec.num_particles];
            for idx in 0..dim {
                spec.decode(idx, &mut sites);
                let (mut c, mut s) = (T::zero(), T::zero());
                for &site in &sites {
                    c += cos[site];
                    s += sin[site];
                }
                re[(idx, idx)] = creal(c);
                im[(idx, idx)] = creal(s);
            }
            Ok(DensityOperator::Fourier { re, im })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_hilbert::hermiticity_defect;
    use crate::scalar::max_abs;
    use crate::exact_hilbert::lattice::build_hamiltonian;

    fn spec(n: usize, d: usize) -> LatticeSpec<f64> {
        LatticeSpec::new(n, d, 1.0, 1.0).with_pair_function(|r| if r == 0 { 1.3 } else if r == 1 { 0.4 } else { 0.0 })
    }

    #[test]
    fn full_window_number_is_n_identity() {
        let s = spec(2, 3);
        let w = SiteWindow::run(0, 3, 3, Boundary::Periodic).unwrap();
        let op = build_density_operator(&s, &DensityOperatorSpec::number(w)).unwrap();
        let op = op.primary();
        for r in 0..9 {
            for c in 0..9 {
                let expect = if r == c { 2.0 } else { 0.0 };
                assert_eq!(op[(r, c)], Complex::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn zero_mode_fourier_is_n_identity() {
        let s = spec(2, 4);
        let op = build_density_operator(&s, &DensityOperatorSpec::fourier_mode(&s, 0)).unwrap();
        let DensityOperator::Fourier { re, im } = op else { panic!() };
        for r in 0..16 {
            assert_eq!(re[(r, r)], Complex::new(2.0, 0.0));
            assert_eq!(im[(r, r)], Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn half_lattice_number_spectrum() {
        let s = spec(1, 4);
        let w = SiteWindow::run(0, 2, 4, Boundary::Periodic).unwrap();
        let op = build_density_operator(&s, &DensityOperatorSpec::number(w)).unwrap();
        let mut eig: Vec<f64> = op.primary().clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let expect = [0.0, 0.0, 1.0, 1.0];
        for (a, b) in eig.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn all_densities_hermitian() {
        let s = spec(2, 4);
        let w = SiteWindow::run(3, 2, 4, Boundary::Periodic).unwrap();
        for ds in [
            DensityOperatorSpec::number(w.clone()),
            DensityOperatorSpec::momentum(w.clone()),
            DensityOperatorSpec::energy(w.clone()),
            DensityOperatorSpec::energy(w.clone()).with_pair_assignment(PairAssignment::Split),
        ] {
            let op = build_density_operator(&s, &ds).unwrap();
            assert!(hermiticity_defect(op.primary()) < 1e-12);
        }
    }

    #[test]
    fn full_window_energy_is_hamiltonian() {
        let s = spec(2, 4);
        let w = SiteWindow::run(0, 4, 4, Boundary::Periodic).unwrap();
        let h = build_hamiltonian(&s).unwrap();
        for pa in [PairAssignment::LowerIndex, PairAssignment::Split] {
            let e = build_density_operator(&s, &DensityOperatorSpec::energy(w.clone()).with_pair_assignment(pa)).unwrap();
            assert!(max_abs(&(e.primary() - &h)) < 1e-13);
        }
    }

    #[test]
    fn lower_index_assignment_differs_from_split() {
        let s = spec(2, 4);
        let w = SiteWindow::run(0, 1, 4, Boundary::Periodic).unwrap();
        let lo = build_density_operator(&s, &DensityOperatorSpec::energy(w.clone())).unwrap();
        let sp = build_density_operator(&s, &DensityOperatorSpec::energy(w).with_pair_assignment(PairAssignment::Split)).unwrap();
        // particles at (0,1): pair energy 0.4 goes wholly to particle 0 under LowerIndex
        let idx = s.encode(&[0, 1]);
        let kin = lo.primary()[(idx, idx)].re - 0.4;
        assert!((sp.primary()[(idx, idx)].re - (kin + 0.2)).abs() < 1e-14);
        // and to nobody in the window when the lower-index particle sits outside
        let idx = s.encode(&[1, 0]);
        let kin = lo.primary()[(idx, idx)].re;
        assert!((sp.primary()[(idx, idx)].re - (kin + 0.2)).abs() < 1e-14);
    }

    #[test]
    fn momentum_of_plane_wave() {
        let s = LatticeSpec::<f64>::new(1, 8, 0.5, 1.0);
        let w = SiteWindow::run(0, 8, 8, Boundary::Periodic).unwrap();
        let p = build_density_operator(&s, &DensityOperatorSpec::momentum(w)).unwrap();
        let k = 2.0 * std::f64::consts::PI * 1.0 / 8.0;
        let psi = DVector::from_fn(8, |j, _| Complex::from_polar(1.0 / 8f64.sqrt(), k * j as f64));
        let out = p.primary() * &psi;
        let expect = k.sin() / 0.5;
        for j in 0..8 {
            assert!((out[j] - psi[j] * expect).norm() < 1e-13);
        }
    }

    #[test]
    fn window_validation() {
        assert!(matches!(SiteWindow::new(vec![], 4, Boundary::Periodic), Err(HilbertError::EmptyWindow)));
        assert!(SiteWindow::new(vec![3, 0], 4, Boundary::Periodic).is_ok());
        assert!(matches!(
            SiteWindow::new(vec![3, 0], 4, Boundary::Open),
            Err(HilbertError::NonContiguousWindow(_))
        ));
        assert!(matches!(
            SiteWindow::new(vec![0, 2], 4, Boundary::Periodic),
            Err(HilbertError::NonContiguousWindow(_))
        ));
        assert!(SiteWindow::new(vec![0, 1, 2, 3], 4, Boundary::Periodic).is_ok());
    }

    #[test]
    fn incommensurate_k_rejected() {
        let s = spec(1, 4);
        let err = build_density_operator(&s, &DensityOperatorSpec::fourier(0.3)).unwrap_err();
        assert!(matches!(err, HilbertError::IncommensurateWavenumber { .. }));
    }
}
