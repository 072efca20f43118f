//! Spectral projector families built by binning the eigenvalues of a
//! Hermitian operator.

use super::error::{HilbertError, Result};
use super::{hermiticity_defect, Operator};
use crate::scalar::{creal, max_abs, Real};
use nalgebra::{DMatrix, SymmetricEigen};

/// Eigenvalues closer than this are grouped into one cluster before binning.
pub const CLUSTER_TOLERANCE: f64 = 1e-9;

/// Orthogonal projectors, one per bin `[edges[b], edges[b+1])` (last bin closed).
#[derive(Debug, Clone)]
pub struct ProjectorFamily<T: Real> {
    pub bin_edges: Vec<T>,
    pub projectors: Vec<Operator<T>>,
    /// Rank of each projector (number of eigenvalues in the bin).
    pub ranks: Vec<usize>,
    /// Sorted eigenvalues of the source operator.
    pub spectrum: Vec<T>,
}

/// Worst-case deviations from the projector-family invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyDefects {
    pub idempotency: f64,
    pub orthogonality: f64,
    pub completeness: f64,
}

impl FamilyDefects {
    pub fn max(&self) -> f64 {
        self.idempotency.max(self.orthogonality).max(self.completeness)
    }
}

impl<T: Real> ProjectorFamily<T> {
    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.projectors.first().map_or(0, |p| p.nrows())
    }

    /// Bins that received no eigenvalue; their projectors are zero.
    pub fn empty_bins(&self) -> Vec<usize> {
        self.ranks.iter().enumerate().filter(|(_, &r)| r == 0).map(|(b, _)| b).collect()
    }

    /// True when a single bin holds the whole spectrum.
    pub fn is_trivial(&self) -> bool {
        self.ranks.iter().filter(|&&r| r > 0).count() == 1
    }

    /// The one-bin family `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            bin_edges: vec![-T::max_value().unwrap_or(T::lit(f64::MAX)), T::max_value().unwrap_or(T::lit(f64::MAX))],
            projectors: vec![Operator::identity(dim, dim)],
            ranks: vec![dim],
            spectrum: Vec::new(),
        }
    }

    pub fn check(&self) -> FamilyDefects {
        let dim = self.dimension();
        let mut idem = 0.0f64;
        let mut orth = 0.0f64;
        let mut sum = Operator::<T>::zeros(dim, dim);
        for (i, p) in self.projectors.iter().enumerate() {
            idem = idem.max(max_abs(&(p * p - p)));
            for q in &self.projectors[i + 1..] {
                orth = orth.max(max_abs(&(p * q)));
            }
            sum += p;
        }
        let complete = max_abs(&(sum - Operator::identity(dim, dim)));
        FamilyDefects { idempotency: idem, orthogonality: orth, completeness: complete }
    }
}

fn bin_of<T: Real>(edges: &[T], x: T) -> Option<usize> {
    let last = edges.len() - 2;
    if x < edges[0] || x > edges[last + 1] {
        return None;
    }
    // left-closed, right-open; the last bin is closed
    let b = edges.partition_point(|&e| e <= x);
    Some((b.saturating_sub(1)).min(last))
}

fn check_edges<T: Real>(edges: &[T]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(HilbertError::BadBinEdges);
    }
    Ok(())
}

/// Eigendecomposition with a fast exact path for diagonal operators.
/// Returns eigenvalues ascending and matching eigenvector columns.
pub fn hermitian_eigen<T: Real>(op: &Operator<T>) -> (Vec<T>, Operator<T>) {
    let n = op.nrows();
    let diagonal = (0..n).all(|c| (0..n).all(|r| r == c || op[(r, c)] == creal(T::zero())));
    let (values, vectors): (Vec<T>, Operator<T>) = if diagonal {
        ((0..n).map(|i| op[(i, i)].re).collect(), Operator::identity(n, n))
    } else {
        let eig = SymmetricEigen::new(op.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite eigenvalues"));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    (sorted_values, sorted_vectors)
}

/// Projector family of `op` for the given bin edges.
///
/// Eigenvalues within [`CLUSTER_TOLERANCE`] of each other are binned by their
/// cluster mean, so a numerically split degenerate level never straddles an
/// edge.
pub fn spectral_projectors<T: Real>(op: &Operator<T>, bin_edges: &[T]) -> Result<ProjectorFamily<T>> {
    check_edges(bin_edges)?;
    let defect = hermiticity_defect(op);
    if defect > 1e-10 * (1.0 + max_abs(op)) {
        return Err(HilbertError::NotHermitian(defect));
    }
    let (values, vectors) = hermitian_eigen(op);
    let n = values.len();
    let nbins = bin_edges.len() - 1;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nbins];
    let tol = T::lit(CLUSTER_TOLERANCE);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        let mean = values[start..end].iter().fold(T::zero(), |a, &b| a + b)
            / T::from_usize_lossy(end - start);
        let bin = bin_of(bin_edges, mean).ok_or(HilbertError::EigenvalueOutsideBins {
            value: mean.as_f64(),
            lo: bin_edges[0].as_f64(),
            hi: bin_edges[nbins].as_f64(),
        })?;
        members[bin].extend(start..end);
        start = end;
    }
    let projectors = members
        .iter()
        .map(|cols| {
            if cols.is_empty() {
                return Operator::zeros(n, n);
            }
            let v = DMatrix::from_fn(n, cols.len(), |r, c| vectors[(r, cols[c])]);
            let p = &v * v.adjoint();
            // exact Hermitian symmetrization
            (&p + p.adjoint()) * creal(T::lit(0.5))
        })
        .collect();
    Ok(ProjectorFamily {
        bin_edges: bin_edges.to_vec(),
        projectors,
        ranks: members.iter().map(Vec::len).collect(),
        spectrum: values,
    })
}

/// Bin edges that isolate every distinct eigenvalue cluster of `op`:
/// midpoints between clusters plus half a gap (or 0.5) beyond each end.
pub fn edges_per_eigenvalue<T: Real>(op: &Operator<T>) -> Vec<T> {
    let (values, _) = hermitian_eigen(op);
    let tol = T::lit(CLUSTER_TOLERANCE);
    let mut levels: Vec<T> = Vec::new();
    let mut acc: Vec<T> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if i > 0 && v - values[i - 1] > tol {
            levels.push(acc.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize_lossy(acc.len()));
            acc.clear();
        }
        acc.push(v);
    }
    if !acc.is_empty() {
        levels.push(acc.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize_lossy(acc.len()));
    }
    let half = T::lit(0.5);
    let mut edges = Vec::with_capacity(levels.len() + 1);
    let first_gap = if levels.len() > 1 { levels[1] - levels[0] } else { T::one() };
    edges.push(levels[0] - half * first_gap);
    for w in levels.windows(2) {
        edges.push(half * (w[0] + w[1]));
    }
    let last_gap = if levels.len() > 1 { levels[levels.len() - 1] - levels[levels.len() - 2] } else { T::one() };
    edges.push(levels[levels.len() - 1] + half * last_gap);
    edges
}

/// Evenly spaced edges of width `width` covering the spectrum of `op`.
pub fn uniform_edges<T: Real>(op: &Operator<T>, width: T) -> Vec<T> {
    let (values, _) = hermitian_eigen(op);
    let lo = values[0] - T::lit(1e-6) * width;
    let hi = values[values.len() - 1];
    let mut edges = vec![lo];
    while *edges.last().unwrap() <= hi {
        let next = *edges.last().unwrap() + width;
        edges.push(next);
    }
    edges
}
