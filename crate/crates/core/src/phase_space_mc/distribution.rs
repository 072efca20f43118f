use super::error::{PhaseSpaceError, Result};
use rand::Rng;

/// Position marginal `p(q)` on a periodic box `[0, B)^dim`.
///
/// Tabulated densities live on `n` nodes per axis at `x_i = i B / n` and are
/// multilinearly interpolated; the interpolant integrates exactly to
/// `h^dim * sum(values)`, which construction normalizes to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParticleDistribution {
    pub dim: usize,
    pub box_len: f64,
    pub shape: Shape,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Uniform,
    /// Product of per-axis 1-D tables, each normalized on its own axis.
    Separable { nodes: usize, factors: Vec<Vec<f64>> },
    /// Full `n^dim` table, axis 0 fastest.
    Grid { nodes: usize, values: Vec<f64> },
}

fn check_domain(dim: usize, box_len: f64) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(PhaseSpaceError::InvalidDistribution(format!("dimension {dim} not in 1..=3")));
    }
    if !(box_len.is_finite() && box_len > 0.0) {
        return Err(PhaseSpaceError::InvalidDistribution(format!("box length {box_len} must be positive")));
    }
    Ok(())
}

fn normalized_table(values: Vec<f64>, cell: f64) -> Result<Vec<f64>> {
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(PhaseSpaceError::InvalidDistribution(format!("density value {v} is negative or not finite")));
    }
    let total: f64 = values.iter().sum::<f64>() * cell;
    if total <= 0.0 {
        return Err(PhaseSpaceError::InvalidDistribution("density integrates to zero".into()));
    }
    Ok(values.into_iter().map(|v| v / total).collect())
}

impl OneParticleDistribution {
    pub fn uniform(dim: usize, box_len: f64) -> Result<Self> {
        check_domain(dim, box_len)?;
        Ok(Self { dim, box_len, shape: Shape::Uniform })
    }

    /// Same 1-D profile `f` on every axis.
    pub fn separable(dim: usize, box_len: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_domain(dim, box_len)?;
        if nodes < 2 {
            return Err(PhaseSpaceError::InvalidDistribution("need at least 2 nodes".into()));
        }
        let h = box_len / nodes as f64;
        let table = normalized_table((0..nodes).map(|i| f(i as f64 * h)).collect(), h)?;
        Ok(Self { dim, box_len, shape: Shape::Separable { nodes, factors: vec![table; dim] } })
    }

    /// General table from `f(q)` sampled at the nodes.
    pub fn from_fn(dim: usize, box_len: f64, nodes: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        check_domain(dim, box_len)?;
        if nodes < 2 {
            return Err(PhaseSpaceError::InvalidDistribution("need at least 2 nodes".into()));
        }
        let h = box_len / nodes as f64;
        let total = nodes.pow(dim as u32);
        let mut q = vec![0.0; dim];
        let values = (0..total)
            .map(|idx| {
                let mut rest = idx;
                for x in q.iter_mut() {
                    *x = (rest % nodes) as f64 * h;
                    rest /= nodes;
                }
                f(&q)
            })
            .collect();
        let values = normalized_table(values, h.powi(dim as i32))?;
        Ok(Self { dim, box_len, shape: Shape::Grid { nodes, values } })
    }

    pub fn volume(&self) -> f64 {
        self.box_len.powi(self.dim as i32)
    }

    /// Node spacing, or `None` for the analytic uniform density.
    pub fn grid_spacing(&self) -> Option<f64> {
        match &self.shape {
            Shape::Uniform => None,
            Shape::Separable { nodes, .. } | Shape::Grid { nodes, .. } => Some(self.box_len / *nodes as f64),
        }
    }

    /// Piecewise-linear periodic interpolation weights along one axis.
    fn hat(&self, nodes: usize, x: f64) -> (usize, usize, f64) {
        let h = self.box_len / nodes as f64;
        let u = x.rem_euclid(self.box_len) / h;
        let i = (u.floor() as usize).min(nodes - 1);
        (i, (i + 1) % nodes, u - i as f64)
    }

    pub fn density(&self, q: &[f64]) -> f64 {
        match &self.shape {
            Shape::Uniform => 1.0 / self.volume(),
            Shape::Separable { nodes, factors } => factors
                .iter()
                .zip(q)
                .map(|(f, &x)| {
                    let (i, j, t) = self.hat(*nodes, x);
                    f[i] * (1.0 - t) + f[j] * t
                })
                .product(),
            Shape::Grid { nodes, values } => {
                let n = *nodes;
                let mut acc = 0.0;
                let corners: Vec<(usize, usize, f64)> = q.iter().map(|&x| self.hat(n, x)).collect();
                for mask in 0..(1usize << self.dim) {
                    let mut idx = 0;
                    let mut stride = 1;
                    let mut w = 1.0;
                    for (a, &(i, j, t)) in corners.iter().enumerate() {
                        if mask >> a & 1 == 1 {
                            idx += j * stride;
                            w *= t;
                        } else {
                            idx += i * stride;
                            w *= 1.0 - t;
                        }
                        stride *= n;
                    }
                    acc += w * values[idx];
                }
                acc
            }
        }
    }

    /// Upper bound of the interpolant (its largest node value).
    pub fn max_density(&self) -> f64 {
        match &self.shape {
            Shape::Uniform => 1.0 / self.volume(),
            Shape::Separable { factors, .. } => factors.iter().map(|f| f.iter().cloned().fold(0.0, f64::max)).product(),
            Shape::Grid { values, .. } => values.iter().cloned().fold(0.0, f64::max),
        }
    }

    /// Integral of the interpolant, which is 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        match &self.shape {
            Shape::Uniform => 1.0,
            Shape::Separable { nodes, factors } => {
                let h = self.box_len / *nodes as f64;
                factors.iter().map(|f| f.iter().sum::<f64>() * h).product()
            }
            Shape::Grid { nodes, values } => values.iter().sum::<f64>() * (self.box_len / *nodes as f64).powi(self.dim as i32),
        }
    }

    /// Draws one position into `out` (rejection against the maximum node).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let draw = |rng: &mut R, out: &mut [f64]| {
            for x in out.iter_mut() {
                *x = rng.random::<f64>() * self.box_len;
            }
        };
        if let Shape::Uniform = self.shape {
            draw(rng, out);
            return;
        }
        let top = self.max_density();
        loop {
            draw(rng, out);
            if rng.random::<f64>() * top < self.density(out) {
                return;
            }
        }
    }

    /// `int_lo^{lo+width} hat_i(x) dx` on the periodic axis, for every node.
    pub(crate) fn hat_integrals(&self, nodes: usize, lo: f64, width: f64) -> Vec<f64> {
        let h = self.box_len / nodes as f64;
        let mut out = vec![0.0; nodes];
        // integrate the interpolant cell by cell over the (unwrapped) interval
        let (a, b) = (lo, lo + width);
        let first = (a / h).floor() as i64;
        let last = (b / h).ceil() as i64;
        for c in first..last {
            let x0 = (c as f64 * h).max(a);
            let x1 = ((c + 1) as f64 * h).min(b);
            if x1 <= x0 {
                continue;
            }
            let t0 = (x0 - c as f64 * h) / h;
            let t1 = (x1 - c as f64 * h) / h;
            let i = c.rem_euclid(nodes as i64) as usize;
            let j = (i + 1) % nodes;
            // int (1 - t) dt and int t dt, times h
            out[i] += h * ((t1 - t0) - 0.5 * (t1 * t1 - t0 * t0));
            out[j] += h * 0.5 * (t1 * t1 - t0 * t0);
        }
        out
    }

    /// Exact `int_box-window p(q) dq` of the interpolant over an axis-aligned box.
    pub fn box_mass(&self, lo: &[f64], side: &[f64]) -> f64 {
        match &self.shape {
            Shape::Uniform => side.iter().product::<f64>() / self.volume(),
            Shape::Separable { nodes, factors } => factors
                .iter()
                .enumerate()
                .map(|(a, f)| {
                    let w = self.hat_integrals(*nodes, lo[a], side[a]);
                    f.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>()
                })
                .product(),
            Shape::Grid { nodes, values } => {
                let n = *nodes;
                let per_axis: Vec<Vec<f64>> = (0..self.dim).map(|a| self.hat_integrals(n, lo[a], side[a])).collect();
                values
                    .iter()
                    .enumerate()
                    .map(|(idx, v)| {
                        let mut rest = idx;
                        let mut w = *v;
                        for ax in &per_axis {
                            w *= ax[rest % n];
                            rest /= n;
                        }
                        w
                    })
                    .sum()
            }
        }
    }
}
