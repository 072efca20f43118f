//! Conserved-quantity superpositions and the approximate-eigenstate measure
//! `(Delta Q)^2 / <Q>^2`.

use super::error::{HilbertError, Result};
use super::histories::{decoherence_functional, epsilon_decoherence, DecoherenceMatrix, EpsilonReport, HistorySchedule};
use super::lattice::{build_hamiltonian, LatticeSpec};
use super::state::{PureState, Propagator};
use super::Operator;
use crate::scalar::{creal, max_abs, modulus, modulus_sq, Real};
use nalgebra::DVector;

/// Mean and variance of an observable together with both spread measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakingRatio<T> {
    pub mean: T,
    pub variance: T,
    /// `(Delta Q)^2 / <Q>^2`.
    pub ratio: T,
    /// `Delta Q / |<Q>|`.
    pub relative_spread: T,
}

/// `(<Q>, <Q^2> - <Q>^2)` for a Hermitian `Q`.
pub fn moments<T: Real>(state: &PureState<T>, op: &Operator<T>) -> Result<(T, T)> {
    if op.nrows() != state.dim() {
        return Err(HilbertError::DimensionMismatch { expected: state.dim(), got: op.nrows() });
    }
    let q_psi = op * state.amplitudes();
    let mean = state.amplitudes().dotc(&q_psi).re;
    let second = q_psi.norm_squared();
    Ok((mean, (second - mean * mean).max(T::zero())))
}

/// Same as [`moments`] for an operator diagonal in the product basis.
pub fn moments_diagonal<T: Real>(state: &PureState<T>, diag: &DVector<T>) -> Result<(T, T)> {
    if diag.len() != state.dim() {
        return Err(HilbertError::DimensionMismatch { expected: state.dim(), got: diag.len() });
    }
    let (mut m1, mut m2) = (T::zero(), T::zero());
    for (a, &q) in state.amplitudes().iter().zip(diag.iter()) {
        let p = modulus_sq(*a);
        m1 += p * q;
        m2 += p * q * q;
    }
    Ok((m1, (m2 - m1 * m1).max(T::zero())))
}

fn ratio_from<T: Real>(mean: T, variance: T) -> Result<PeakingRatio<T>> {
    if mean.abs() <= T::tol(1e-14) {
        return Err(HilbertError::ZeroMean { variance: variance.as_f64() });
    }
    Ok(PeakingRatio {
        mean,
        variance,
        ratio: variance / (mean * mean),
        relative_spread: variance.sqrt() / mean.abs(),
    })
}

/// `(Delta Q)^2 / <Q>^2`; errors when `<Q>` vanishes (use [`moments`] for
/// the raw variance in that case).
pub fn peaking_ratio<T: Real>(state: &PureState<T>, op: &Operator<T>) -> Result<PeakingRatio<T>> {
    let (m, v) = moments(state, op)?;
    ratio_from(m, v)
}

pub fn peaking_ratio_diagonal<T: Real>(state: &PureState<T>, diag: &DVector<T>) -> Result<PeakingRatio<T>> {
    let (m, v) = moments_diagonal(state, diag)?;
    ratio_from(m, v)
}

/// Output of [`conserved_superposition_experiment`].
#[derive(Debug, Clone)]
pub struct ConservedExperiment<T: Real> {
    pub matrix: DecoherenceMatrix<T>,
    pub epsilon: EpsilonReport,
    pub eigenvalue_a: T,
    pub eigenvalue_b: T,
    /// `max |[Q, H]|`.
    pub commutator_norm: f64,
}

/// Decoherence functional of `(|a> + |b>)/sqrt 2`, where `a` and `b` are
/// orthogonal eigenstates of a conserved `Q` and every schedule family is
/// drawn from the spectral family of `Q`.
pub fn conserved_superposition_experiment<T: Real>(
    spec: &LatticeSpec<T>,
    q: &Operator<T>,
    a: &PureState<T>,
    b: &PureState<T>,
    schedule: &HistorySchedule<T>,
) -> Result<ConservedExperiment<T>> {
    let h = build_hamiltonian(spec)?;
    if q.nrows() != h.nrows() || a.dim() != h.nrows() || b.dim() != h.nrows() {
        return Err(HilbertError::DimensionMismatch { expected: h.nrows(), got: q.nrows() });
    }
    let overlap = modulus(a.inner(b)).as_f64();
    if overlap >= 1e-12 {
        return Err(HilbertError::Precondition { what: "<a|b> = 0".into(), norm: overlap });
    }
    let eig = |s: &PureState<T>, name: &str| -> Result<T> {
        let lambda = s.expectation(q);
        let resid = max_abs(&(q * s.amplitudes() - s.amplitudes() * creal(lambda)));
        if resid >= 1e-10 {
            return Err(HilbertError::Precondition { what: format!("Q|{name}> = {name}|{name}>"), norm: resid });
        }
        Ok(lambda)
    };
    let eigenvalue_a = eig(a, "a")?;
    let eigenvalue_b = eig(b, "b")?;
    let commutator_norm = max_abs(&(q * &h - &h * q));
    if commutator_norm >= 1e-12 {
        return Err(HilbertError::Precondition { what: "[Q, H] = 0".into(), norm: commutator_norm });
    }
    for family in schedule.families() {
        for p in &family.projectors {
            let c = max_abs(&(p * q - q * p));
            if c >= 1e-10 {
                return Err(HilbertError::Precondition {
                    what: "schedule projectors drawn from the spectral family of Q".into(),
                    norm: c,
                });
            }
        }
    }
    let sum = a.amplitudes() + b.amplitudes();
    let psi = PureState::normalized(sum)?;
    let prop = Propagator::new(&h, spec.hbar)?;
    let matrix = decoherence_functional(&psi, schedule, &prop)?;
    let epsilon = epsilon_decoherence(&matrix);
    Ok(ConservedExperiment { matrix, epsilon, eigenvalue_a, eigenvalue_b, commutator_norm })
}

/// Total lattice translation `T = prod_j S_j`, a permutation of the basis.
pub fn total_translation<T: Real>(spec: &LatticeSpec<T>) -> Operator<T> {
    let dim = spec.dimension();
    let d = spec.num_sites;
    let mut out = Operator::zeros(dim, dim);
    let mut sites = vec![0usize; spec.num_particles];
    for col in 0..dim {
        spec.decode(col, &mut sites);
        // (T psi)(s) = psi(s + 1): column s+1 maps to row s
        let shifted: Vec<usize> = sites.iter().map(|&s| (s + d - 1) % d).collect();
        out[(spec.encode(&shifted), col)] = creal(T::one());
    }
    out
}

/// Hermitian `(T + T^dagger) / 2`, conserved on a periodic lattice with a
/// translation-invariant pair potential.
pub fn translation_cosine<T: Real>(spec: &LatticeSpec<T>) -> Operator<T> {
    let t = total_translation(spec);
    (&t + t.adjoint()) * creal(T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_hilbert::density::{build_density_operator, number_density_diagonal, DensityOperatorSpec, SiteWindow};
    use crate::exact_hilbert::lattice::Boundary;
    use crate::exact_hilbert::projectors::{edges_per_eigenvalue, spectral_projectors};
    use crate::scalar::Complex;

    #[test]
    fn eigenstate_has_zero_ratio() {
        let psi = PureState::<f64>::basis(4, 2);
        let q = Operator::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0].into_iter().map(creal).collect()));
        let r = peaking_ratio(&psi, &q).unwrap();
        assert!(r.ratio.abs() < 1e-12);
    }

    #[test]
    fn equal_superposition_of_zero_and_two() {
        let q = Operator::from_diagonal(&DVector::from_vec(vec![creal(0.0), creal(2.0)]));
        let psi = PureState::<f64>::normalized(DVector::from_element(2, creal(1.0))).unwrap();
        let r = peaking_ratio(&psi, &q).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-14);
        assert!((r.relative_spread - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_mean_is_error_with_variance() {
        let q = Operator::from_diagonal(&DVector::from_vec(vec![creal(-1.0), creal(1.0)]));
        let psi = PureState::<f64>::normalized(DVector::from_element(2, creal(1.0))).unwrap();
        match peaking_ratio(&psi, &q) {
            Err(HilbertError::ZeroMean { variance }) => assert!((variance - 1.0).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diagonal_and_dense_moments_agree() {
        let spec = LatticeSpec::<f64>::new(3, 3, 1.0, 1.0);
        let w = SiteWindow::run(1, 2, 3, Boundary::Periodic).unwrap();
        let dense = build_density_operator(&spec, &DensityOperatorSpec::number(w.clone())).unwrap();
        let diag = number_density_diagonal(&spec, &w).unwrap();
        let psi = PureState::product(&[Complex::new(0.3, 0.1), Complex::new(0.5, 0.0), Complex::new(0.2, -0.4)], 3).unwrap();
        let a = peaking_ratio(&psi, dense.primary()).unwrap();
        let b = peaking_ratio_diagonal(&psi, &diag).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-13);
    }

    #[test]
    fn translation_commutes_with_hamiltonian() {
        let spec = LatticeSpec::<f64>::new(2, 5, 1.0, 1.0).with_pair_function(|r| 1.0 / (1.0 + r as f64));
        let h = build_hamiltonian(&spec).unwrap();
        let q = translation_cosine(&spec);
        assert!(max_abs(&(&q * &h - &h * &q)) < 1e-14);
    }

    #[test]
    fn superposition_of_translation_sectors_decoheres() {
        let spec = LatticeSpec::<f64>::new(2, 4, 1.0, 1.0).with_pair_function(|r| if r == 0 { 1.5 } else { 0.25 });
        let q = translation_cosine(&spec);
        let fam = spectral_projectors(&q, &edges_per_eigenvalue(&q)).unwrap();
        // a, b: projections of a generic vector onto two different sectors
        let v = DVector::from_fn(16, |i, _| Complex::new(1.0 + i as f64, (i as f64 * 0.7).cos()));
        let live: Vec<usize> = (0..fam.len()).filter(|&i| fam.ranks[i] > 0).collect();
        let a = PureState::normalized(&fam.projectors[live[0]] * &v).unwrap();
        let b = PureState::normalized(&fam.projectors[live[1]] * &v).unwrap();
        let sched = HistorySchedule::repeated(vec![0.0, 0.6, 1.7], fam).unwrap();
        let out = conserved_superposition_experiment(&spec, &q, &a, &b, &sched).unwrap();
        assert!(out.epsilon.epsilon < 1e-10);
        assert!(out.matrix.max_off_diagonal() < 1e-10);
        assert!((out.eigenvalue_a - out.eigenvalue_b).abs() > 0.1);
    }

    #[test]
    fn precondition_violations_report_norm() {
        let spec = LatticeSpec::<f64>::new(1, 4, 1.0, 1.0);
        let q = translation_cosine(&spec);
        let fam = spectral_projectors(&q, &edges_per_eigenvalue(&q)).unwrap();
        let sched = HistorySchedule::repeated(vec![0.0], fam).unwrap();
        let a = PureState::basis(4, 0);
        let err = conserved_superposition_experiment(&spec, &q, &a, &a, &sched).unwrap_err();
        match err {
            HilbertError::Precondition { norm, .. } => assert!(norm > 0.5),
            other => panic!("{other:?}"),
        }
    }
}
