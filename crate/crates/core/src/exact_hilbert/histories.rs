//! Histories, the decoherence functional and its diagnostics.
//!
//! For a history string `a = (a_1 .. a_n)` the branch state is
//! `C_a |psi> = P_{a_n} U(t_n - t_{n-1}) ... P_{a_2} U(t_2 - t_1) P_{a_1} U(t_1) |psi>`
//! with `|psi>` given at `t = 0`, and `D(a, a') = <C_a' psi | C_a psi>`.

use super::error::{HilbertError, Result};
use super::projectors::ProjectorFamily;
use super::state::{PureState, Propagator};
use super::{Operator, StateVector};
use crate::scalar::{modulus, Complex, Real};
use rayon::prelude::*;
use std::io::Write;

/// Default cap on the number of history strings.
pub const DEFAULT_HISTORY_CAP: usize = 10_000;

#[derive(Debug, Clone)]
pub struct HistorySchedule<T: Real> {
    times: Vec<T>,
    families: Vec<ProjectorFamily<T>>,
}

impl<T: Real> HistorySchedule<T> {
    pub fn new(times: Vec<T>, families: Vec<ProjectorFamily<T>>) -> Result<Self> {
        Self::with_cap(times, families, DEFAULT_HISTORY_CAP)
    }

    pub fn with_cap(times: Vec<T>, families: Vec<ProjectorFamily<T>>, cap: usize) -> Result<Self> {
        if times.is_empty() || times.len() != families.len() {
            return Err(HilbertError::ScheduleMismatch { times: times.len(), families: families.len() });
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HilbertError::NonIncreasingTimes);
        }
        let dim = families[0].dimension();
        if let Some(f) = families.iter().find(|f| f.dimension() != dim) {
            return Err(HilbertError::DimensionMismatch { expected: dim, got: f.dimension() });
        }
        let count = families.iter().fold(1u128, |acc, f| acc.saturating_mul(f.len() as u128));
        if count > cap as u128 {
            return Err(HilbertError::HistoryCap { count, cap });
        }
        Ok(Self { times, families })
    }

    /// The same family at every time.
    pub fn repeated(times: Vec<T>, family: ProjectorFamily<T>) -> Result<Self> {
        let families = vec![family; times.len()];
        Self::new(times, families)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn families(&self) -> &[ProjectorFamily<T>] {
        &self.families
    }

    pub fn dimension(&self) -> usize {
        self.families[0].dimension()
    }

    pub fn num_strings(&self) -> usize {
        self.families.iter().map(ProjectorFamily::len).product()
    }

    /// History labels in lexicographic order (first time most significant).
    pub fn labels(&self) -> Vec<Vec<usize>> {
        let mut labels = vec![Vec::new()];
        for f in &self.families {
            labels = labels
                .into_iter()
                .flat_map(|l| {
                    (0..f.len()).map(move |a| {
                        let mut next = l.clone();
                        next.push(a);
                        next
                    })
                })
                .collect();
        }
        labels
    }
}

/// `D(a, a')` over all history strings, rows indexed by `a`.
#[derive(Debug, Clone)]
pub struct DecoherenceMatrix<T: Real> {
    pub entries: Operator<T>,
    pub labels: Vec<Vec<usize>>,
}

impl<T: Real> DecoherenceMatrix<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `p(a) = D(a, a)`.
    pub fn probabilities(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.entries[(i, i)].re).collect()
    }

    pub fn trace(&self) -> T {
        self.probabilities().into_iter().fold(T::zero(), |a, b| a + b)
    }

    /// `max |D(a,a') - conj D(a',a)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        super::hermiticity_defect(&self.entries)
    }

    /// Largest `|D(a, a')|` with `a != a'`.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.len();
        let mut m = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    m = m.max(modulus(self.entries[(r, c)]).as_f64());
                }
            }
        }
        m
    }

    pub fn label_string(&self, i: usize) -> String {
        label_string(&self.labels[i])
    }

    /// CSV with one row per pair: `history,history_prime,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "history,history_prime,re,im")?;
        for r in 0..self.len() {
            for c in 0..self.len() {
                let z = self.entries[(r, c)];
                writeln!(w, "{},{},{},{}", self.label_string(r), self.label_string(c), z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Labels are joined with `-`, e.g. `0-2-1`.
pub fn label_string(label: &[usize]) -> String {
    label.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
}

/// Branch states `C_a |psi>` for every history string, in label order.
pub fn branch_states<T: Real>(
    initial: &PureState<T>,
    schedule: &HistorySchedule<T>,
    propagator: &Propagator<T>,
) -> Result<Vec<StateVector<T>>> {
    let dim = schedule.dimension();
    if initial.dim() != dim || propagator.dim() != dim {
        return Err(HilbertError::DimensionMismatch { expected: dim, got: initial.dim().max(propagator.dim()) });
    }
    let first = propagator.apply(initial.amplitudes(), schedule.times()[0]);
    let mut branches = vec![first];
    let mut prev = schedule.times()[0];
    for (i, (family, &t)) in schedule.families().iter().zip(schedule.times()).enumerate() {
        let dt = if i == 0 { T::zero() } else { t - prev };
        prev = t;
        branches = branches
            .par_iter()
            .map(|v| {
                let v = propagator.apply(v, dt);
                family.projectors.iter().map(|p| p * &v).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
    }
    Ok(branches)
}

/// Gram matrix `G(a, a') = <b_a' | b_a>` of branch vectors. Only the upper
/// triangle is computed; the lower is its exact conjugate mirror.
pub fn branch_gram<T: Real>(branches: &[StateVector<T>]) -> Operator<T> {
    let n = branches.len();
    let zero = Complex::new(T::zero(), T::zero());
    let live: Vec<bool> = branches.iter().map(|b| b.iter().any(|z| *z != zero)).collect();
    let rows: Vec<Vec<Complex<T>>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (a..n)
                .map(|b| if live[a] && live[b] { branches[b].dotc(&branches[a]) } else { zero })
                .collect()
        })
        .collect();
    let mut g = Operator::zeros(n, n);
    for (a, row) in rows.into_iter().enumerate() {
        for (off, z) in row.into_iter().enumerate() {
            let b = a + off;
            g[(a, b)] = z;
            g[(b, a)] = z.conj();
        }
        g[(a, a)].im = T::zero();
    }
    g
}

/// Evaluates the decoherence functional by propagating each branch once.
pub fn decoherence_functional<T: Real>(
    initial: &PureState<T>,
    schedule: &HistorySchedule<T>,
    propagator: &Propagator<T>,
) -> Result<DecoherenceMatrix<T>> {
    let branches = branch_states(initial, schedule, propagator)?;
    Ok(DecoherenceMatrix { entries: branch_gram(&branches), labels: schedule.labels() })
}

/// Worst normalized interference `|D(a,a')| / sqrt(D(a,a) D(a',a'))`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonReport {
    pub epsilon: f64,
    pub worst_pair: Option<(Vec<usize>, Vec<usize>)>,
}

/// Diagonals below this are skipped when normalizing.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

pub fn epsilon_decoherence<T: Real>(d: &DecoherenceMatrix<T>) -> EpsilonReport {
    let p: Vec<f64> = d.probabilities().into_iter().map(Real::as_f64).collect();
    let mut eps = 0.0f64;
    let mut worst = None;
    for a in 0..d.len() {
        if p[a] < NEGLIGIBLE_PROBABILITY {
            continue;
        }
        for b in a + 1..d.len() {
            if p[b] < NEGLIGIBLE_PROBABILITY {
                continue;
            }
            let v = modulus(d.entries[(a, b)]).as_f64() / (p[a] * p[b]).sqrt();
            if v > eps {
                eps = v;
                worst = Some((d.labels[a].clone(), d.labels[b].clone()));
            }
        }
    }
    EpsilonReport { epsilon: eps, worst_pair: worst }
}

/// Sum-rule diagnostics for one coarse-grained cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSumRule {
    /// Probability of the summed branch state.
    pub p_cell: f64,
    /// Sum of fine-grained diagonal probabilities.
    pub p_sum: f64,
    pub residual: f64,
    /// `2 sum_{a<a' in cell} |D(a,a')|`.
    pub interference_bound: f64,
}

impl CellSumRule {
    pub fn within_bound(&self, slack: f64) -> bool {
        self.residual <= self.interference_bound + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRuleReport {
    pub cells: Vec<CellSumRule>,
    pub total_probability: f64,
}

impl SumRuleReport {
    pub fn max_residual(&self) -> f64 {
        self.cells.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

/// Compares coarse-grained probabilities with sums of fine-grained ones.
///
/// `partition` lists string indices per cell and must cover every string
/// exactly once. `p(cell) = sum_{a,a' in cell} D(a,a')` equals the squared
/// norm of the summed branch state.
pub fn probability_sum_check<T: Real>(d: &DecoherenceMatrix<T>, partition: &[Vec<usize>]) -> Result<SumRuleReport> {
    let n = d.len();
    let mut seen = vec![false; n];
    for &i in partition.iter().flatten() {
        if i >= n || seen[i] {
            return Err(HilbertError::BadPartition(format!("index {i} out of range or repeated")));
        }
        seen[i] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(HilbertError::BadPartition(format!("string {missing} not covered")));
    }
    let cells = partition
        .iter()
        .map(|cell| {
            let mut total = 0.0;
            let mut diag = 0.0;
            let mut off = 0.0;
            for (ia, &a) in cell.iter().enumerate() {
                for (ib, &b) in cell.iter().enumerate() {
                    let z = d.entries[(a, b)];
                    total += z.re.as_f64();
                    if ia == ib {
                        diag += z.re.as_f64();
                    } else if ia < ib {
                        off += 2.0 * modulus(z).as_f64();
                    }
                }
            }
            CellSumRule { p_cell: total, p_sum: diag, residual: (total - diag).abs(), interference_bound: off }
        })
        .collect();
    Ok(SumRuleReport { cells, total_probability: d.trace().as_f64() })
}

/// Groups history strings that agree at the kept time indices; the other
/// times are summed over.
pub fn coarse_grain_partition(labels: &[Vec<usize>], keep_times: &[usize]) -> Vec<Vec<usize>> {
    let mut cells: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        let key: Vec<usize> = keep_times.iter().map(|&t| l[t]).collect();
        match cells.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(i),
            None => cells.push((key, vec![i])),
        }
    }
    cells.into_iter().map(|(_, m)| m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_hilbert::density::{build_density_operator, DensityOperatorSpec, SiteWindow};
    use crate::exact_hilbert::lattice::{build_hamiltonian, Boundary, LatticeSpec};
    use crate::exact_hilbert::projectors::{edges_per_eigenvalue, spectral_projectors};

    fn setup() -> (LatticeSpec<f64>, Operator<f64>, Propagator<f64>) {
        let spec = LatticeSpec::new(2, 3, 1.0, 1.0).with_pair_function(|r| if r == 0 { 2.0 } else { 0.5 });
        let h = build_hamiltonian(&spec).unwrap();
        let prop = Propagator::new(&h, 1.0).unwrap();
        (spec, h, prop)
    }

    fn window_family(spec: &LatticeSpec<f64>) -> ProjectorFamily<f64> {
        let w = SiteWindow::run(0, 1, spec.num_sites, Boundary::Periodic).unwrap();
        let n = build_density_operator(spec, &DensityOperatorSpec::number(w)).unwrap();
        spectral_projectors(n.primary(), &[-0.5, 0.5, 1.5, 2.5]).unwrap()
    }

    fn generic_state(dim: usize) -> PureState<f64> {
        PureState::normalized(StateVector::from_fn(dim, |i, _| Complex::new(1.0 + i as f64 * 0.3, (i as f64).sin()))).unwrap()
    }

    #[test]
    fn single_time_is_diagonal() {
        let (spec, _, prop) = setup();
        let fam = window_family(&spec);
        let psi = generic_state(9);
        let sched = HistorySchedule::new(vec![0.0], vec![fam.clone()]).unwrap();
        let d = decoherence_functional(&psi, &sched, &prop).unwrap();
        assert_eq!(d.max_off_diagonal(), 0.0);
        for (a, p) in fam.projectors.iter().enumerate() {
            let expect = (p * psi.amplitudes()).norm_squared();
            assert!((d.entries[(a, a)].re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn conserved_family_eigenstate_single_entry() {
        let (_, h, prop) = setup();
        let fam = spectral_projectors(&h, &edges_per_eigenvalue(&h)).unwrap();
        let psi = PureState::new(prop.eigenvectors().column(3).into_owned()).unwrap();
        let sched = HistorySchedule::repeated(vec![0.0, 0.7, 1.9], fam).unwrap();
        let d = decoherence_functional(&psi, &sched, &prop).unwrap();
        let p = d.probabilities();
        let big: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 1e-10).collect();
        assert_eq!(big.len(), 1);
        assert!((p[big[0]] - 1.0).abs() < 1e-10);
        assert!(d.max_off_diagonal() < 1e-10);
    }

    #[test]
    fn trace_and_hermiticity() {
        let (spec, _, prop) = setup();
        let fam = window_family(&spec);
        let sched = HistorySchedule::repeated(vec![0.2, 0.9, 1.4], fam).unwrap();
        let d = decoherence_functional(&generic_state(9), &sched, &prop).unwrap();
        assert_eq!(d.len(), 27);
        assert!((d.trace() - 1.0).abs() < 1e-10);
        assert_eq!(d.hermiticity_defect(), 0.0);
        assert!(d.probabilities().iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn epsilon_examples() {
        let diag = DecoherenceMatrix {
            entries: Operator::<f64>::from_diagonal(&StateVector::from_vec(vec![Complex::new(0.5, 0.0), Complex::new(0.5, 0.0)])),
            labels: vec![vec![0], vec![1]],
        };
        assert_eq!(epsilon_decoherence(&diag).epsilon, 0.0);
        let coherent = DecoherenceMatrix {
            entries: Operator::<f64>::from_element(2, 2, Complex::new(0.5, 0.0)),
            labels: vec![vec![0], vec![1]],
        };
        let r = epsilon_decoherence(&coherent);
        assert!((r.epsilon - 1.0).abs() < 1e-15);
        assert_eq!(r.worst_pair, Some((vec![0], vec![1])));
    }

    #[test]
    fn sum_rules_single_cell_and_decoherent() {
        let (spec, _, prop) = setup();
        let fam = window_family(&spec);
        let sched = HistorySchedule::repeated(vec![0.0, 1.1], fam).unwrap();
        let d = decoherence_functional(&generic_state(9), &sched, &prop).unwrap();
        let all: Vec<usize> = (0..d.len()).collect();
        let rep = probability_sum_check(&d, &[all]).unwrap();
        assert!((rep.cells[0].p_cell - 1.0).abs() < 1e-10);
        assert!(rep.cells[0].within_bound(1e-12));
        // fully fine-grained partition: zero residual
        let fine: Vec<Vec<usize>> = (0..d.len()).map(|i| vec![i]).collect();
        assert_eq!(probability_sum_check(&d, &fine).unwrap().max_residual(), 0.0);
    }

    #[test]
    fn partition_must_cover() {
        let (spec, _, prop) = setup();
        let sched = HistorySchedule::new(vec![0.0], vec![window_family(&spec)]).unwrap();
        let d = decoherence_functional(&generic_state(9), &sched, &prop).unwrap();
        assert!(probability_sum_check(&d, &[vec![0, 1]]).is_err());
        assert!(probability_sum_check(&d, &[vec![0, 1, 2, 2]]).is_err());
    }

    #[test]
    fn schedule_validation() {
        let (spec, _, _) = setup();
        let fam = window_family(&spec);
        assert!(matches!(
            HistorySchedule::repeated(vec![1.0, 0.5], fam.clone()),
            Err(HilbertError::NonIncreasingTimes)
        ));
        assert!(matches!(
            HistorySchedule::with_cap(vec![0.0, 1.0, 2.0], vec![fam.clone(), fam.clone(), fam], 20),
            Err(HilbertError::HistoryCap { count: 27, cap: 20 })
        ));
    }

    #[test]
    fn coarse_partition_groups_by_kept_times() {
        let labels = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        assert_eq!(coarse_grain_partition(&labels, &[1]), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(coarse_grain_partition(&labels, &[]), vec![vec![0, 1, 2, 3]]);
    }
}
