use super::chain::{symplectic_form, ChainSpec};
use super::error::{GaussianError, Result};
use crate::scalar::Real;
use nalgebra::{DMatrix, DVector};
use std::io::{BufRead, Write};

/// Slack on the smallest eigenvalue of `Sigma + (i hbar / 2) Omega`.
pub const UNCERTAINTY_TOLERANCE: f64 = 1e-9;

/// Mean `(q_1..q_M, p_1..p_M)` in absolute positions and the symmetrized
/// covariance `Sigma_ab = 1/2 <{dz_a, dz_b}>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T: Real> {
    pub mean: DVector<T>,
    pub cov: DMatrix<T>,
}

impl<T: Real> GaussianState<T> {
    /// Validates symmetry and the uncertainty principle for the given `hbar`.
    pub fn new(mean: DVector<T>, cov: DMatrix<T>, hbar: T) -> Result<Self> {
        let s = Self { mean, cov };
        s.check(hbar)?;
        Ok(s)
    }

    pub fn num_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn check(&self, hbar: T) -> Result<()> {
        let n = self.mean.len();
        if n == 0 || n % 2 != 0 {
            return Err(GaussianError::DimensionMismatch { expected: 2 * (n / 2).max(1), got: n });
        }
        if self.cov.nrows() != n || self.cov.ncols() != n {
            return Err(GaussianError::DimensionMismatch { expected: n, got: self.cov.nrows() });
        }
        let asym = (&self.cov - self.cov.transpose()).amax().as_f64();
        if asym > 1e-12f64.max(64.0 * T::eps().as_f64()) * self.cov.amax().as_f64().max(1.0) {
            return Err(GaussianError::NotSymmetric(asym));
        }
        let min = self.uncertainty_margin(hbar);
        let scale = self.cov.amax().max(hbar).as_f64();
        let floor = 64.0 * T::eps().as_f64() * scale;
        if min < -UNCERTAINTY_TOLERANCE.max(floor) {
            return Err(GaussianError::Uncertainty(min));
        }
        Ok(())
    }

    /// Smallest eigenvalue of the Hermitian matrix `Sigma + (i hbar / 2) Omega`.
    pub fn uncertainty_margin(&self, hbar: T) -> f64 {
        let m = self.num_modes();
        let b = symplectic_form::<T>(m) * (hbar / T::lit(2.0));
        // real embedding [[A, -B], [B, A]] of A + iB has the same spectrum, doubled
        let n = 2 * m;
        let mut big = DMatrix::zeros(2 * n, 2 * n);
        big.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        big.view_mut((n, n), (n, n)).copy_from(&self.cov);
        big.view_mut((0, n), (n, n)).copy_from(&(-&b));
        big.view_mut((n, 0), (n, n)).copy_from(&b);
        let sym = (&big + big.transpose()) * T::lit(0.5);
        sym.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &v| a.min(v.as_f64()))
    }

    /// Position covariance `sigma(q_j, q_l)`.
    #[inline]
    pub fn sigma_q(&self, j: usize, l: usize) -> T {
        self.cov[(j, l)]
    }

    /// Minimum-uncertainty coherent state at rest: `sigma_qq = hbar / (2 m w)`,
    /// `sigma_pp = hbar m w / 2` on every mode, no cross terms.
    pub fn coherent(q: &[T], p: &[T], mass: T, omega: T, hbar: T) -> Result<Self> {
        if q.len() != p.len() {
            return Err(GaussianError::DimensionMismatch { expected: q.len(), got: p.len() });
        }
        let m = q.len();
        let mut mean = DVector::zeros(2 * m);
        let mut cov = DMatrix::zeros(2 * m, 2 * m);
        for j in 0..m {
            mean[j] = q[j];
            mean[m + j] = p[j];
            cov[(j, j)] = hbar / (T::lit(2.0) * mass * omega);
            cov[(m + j, m + j)] = hbar * mass * omega / T::lit(2.0);
        }
        Self::new(mean, cov, hbar)
    }

    /// Ground state of the chain, centered on the equilibrium positions.
    pub fn ground_state(spec: &ChainSpec<T>) -> Result<Self> {
        let modes = spec.normal_modes()?;
        if modes.omegas.iter().any(|&w| w == T::zero()) {
            return Err(GaussianError::ZeroMode);
        }
        let m = spec.num_modes;
        let half = spec.hbar / T::lit(2.0);
        let o = &modes.vectors;
        let dq = modes.omegas.map(|w| half / (spec.mass * w));
        let dp = modes.omegas.map(|w| half * spec.mass * w);
        let sqq = o * DMatrix::from_diagonal(&dq) * o.transpose();
        let spp = o * DMatrix::from_diagonal(&dp) * o.transpose();
        let mut cov = DMatrix::zeros(2 * m, 2 * m);
        cov.view_mut((0, 0), (m, m)).copy_from(&((&sqq + sqq.transpose()) * T::lit(0.5)));
        cov.view_mut((m, m), (m, m)).copy_from(&((&spp + spp.transpose()) * T::lit(0.5)));
        let mut mean = DVector::zeros(2 * m);
        mean.rows_mut(0, m).copy_from(&DVector::from_column_slice(&spec.equilibrium));
        Self::new(mean, cov, spec.hbar)
    }

    /// CSV: the mean on the first line, then one covariance row per line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let join = |it: &mut dyn Iterator<Item = T>| it.map(|x| format!("{:e}", x.as_f64())).collect::<Vec<_>>().join(",");
        writeln!(w, "{}", join(&mut self.mean.iter().copied()))?;
        for r in 0..self.cov.nrows() {
            writeln!(w, "{}", join(&mut self.cov.row(r).iter().copied()))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, hbar: T) -> Result<Self> {
        let mut rows: Vec<Vec<T>> = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map(T::lit)
                        .map_err(|e| GaussianError::Parse { line: i + 1, msg: e.to_string() })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let Some((mean, cov)) = rows.split_first() else {
            return Err(GaussianError::Parse { line: 1, msg: "empty input".into() });
        };
        let n = mean.len();
        if cov.len() != n {
            return Err(GaussianError::Parse { line: cov.len() + 2, msg: format!("expected {n} covariance rows") });
        }
        if let Some((i, _)) = cov.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(GaussianError::Parse { line: i + 2, msg: format!("expected {n} columns") });
        }
        let cov = DMatrix::from_fn(n, n, |r, c| cov[r][c]);
        Self::new(DVector::from_column_slice(mean), cov, hbar)
    }
}

/// Evolves the moments for time `t` under the chain Hamiltonian.
pub fn evolve_gaussian<T: Real>(state: &GaussianState<T>, spec: &ChainSpec<T>, t: T) -> Result<GaussianState<T>> {
    if !t.is_finite() {
        return Err(GaussianError::BadTime);
    }
    let m = spec.num_modes;
    if state.num_modes() != m {
        return Err(GaussianError::DimensionMismatch { expected: 2 * m, got: state.mean.len() });
    }
    state.check(spec.hbar)?;
    if t == T::zero() {
        return Ok(state.clone());
    }
    let s = spec.normal_modes()?.propagator(t).0;
    let mut z = state.mean.clone();
    for j in 0..m {
        z[j] -= spec.equilibrium[j];
    }
    let mut mean = &s * z;
    for j in 0..m {
        mean[j] += spec.equilibrium[j];
    }
    let cov = &s * &state.cov * s.transpose();
    let cov = (&cov + cov.transpose()) * T::lit(0.5);
    Ok(GaussianState { mean, cov })
}
