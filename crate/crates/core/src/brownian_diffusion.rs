//! Gaussian moments of a Brownian particle under linear friction and
//! momentum diffusion, and the diffusion equation for the density of an
//! N-fold product of such particles.

use crate::scalar::Real;
use crate::stats::fit_line;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BrownianError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("negative evolution time {0}")]
    NegativeTime(f64),
    #[error("time grid needs at least 3 increasing points")]
    BadTimeGrid,
    #[error("x grid must be uniform with at least 5 points")]
    BadSpaceGrid,
    #[error("x spacing {dx} does not resolve the width {width} at t = {t}")]
    Unresolved { dx: f64, width: f64, t: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = BrownianError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianParams<T> {
    pub mass: T,
    pub gamma: T,
    pub d_pp: T,
    /// Recorded for completeness; the moment flow does not depend on it.
    pub hbar: T,
    /// Optional direct position diffusion, zero by default.
    pub d_qq: T,
}

impl<T: Real> BrownianParams<T> {
    pub fn new(mass: T, gamma: T, d_pp: T) -> Self {
        Self { mass, gamma, d_pp, hbar: T::one(), d_qq: T::zero() }
    }

    pub fn with_position_diffusion(mut self, d_qq: T) -> Self {
        self.d_qq = d_qq;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: T| x.is_finite() && x > T::zero();
        if !pos(self.mass) {
            return Err(BrownianError::InvalidParams("mass must be positive".into()));
        }
        if !pos(self.gamma) {
            return Err(BrownianError::InvalidParams("friction must be positive".into()));
        }
        if !pos(self.d_pp) {
            return Err(BrownianError::InvalidParams("momentum diffusion must be positive".into()));
        }
        if !(self.d_qq.is_finite() && self.d_qq >= T::zero()) {
            return Err(BrownianError::InvalidParams("position diffusion must be nonnegative".into()));
        }
        Ok(())
    }

    /// Long-time diffusion constant `D_pp / (m gamma)^2 + D_qq` of the flow.
    pub fn diffusion_constant(&self) -> T {
        self.d_pp / (self.mass * self.mass * self.gamma * self.gamma) + self.d_qq
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneParticleGaussian<T> {
    pub q: T,
    pub p: T,
    pub sqq: T,
    pub sqp: T,
    pub spp: T,
}

impl<T: Real> OneParticleGaussian<T> {
    pub fn new(q: T, p: T, sqq: T, sqp: T, spp: T) -> Result<Self> {
        let s = Self { q, p, sqq, sqp, spp };
        if !(sqq >= T::zero() && spp >= T::zero() && sqq * spp - sqp * sqp >= -T::tol(1e-14) * sqq * spp) {
            return Err(BrownianError::InvalidParams("covariance must be positive semidefinite".into()));
        }
        Ok(s)
    }

    /// Position marginal density at `x`.
    pub fn position_density(&self, x: T) -> T {
        let two = T::lit(2.0);
        let d = x - self.q;
        (-d * d / (two * self.sqq)).exp() / (two * T::pi() * self.sqq).sqrt()
    }
}

/// `(1 - e^{-x})`, `x + e^{-x} - 1` and `(1 - e^{-x}) - (1 - e^{-2x}) / 2`,
/// with series below `x = 1e-4`.
fn decay_terms<T: Real>(x: T) -> (T, T, T) {
    let one_minus = -(-x).exp_m1();
    if x < T::lit(1e-4) {
        let x2 = x * x;
        let x3 = x2 * x;
        let x4 = x3 * x;
        let x5 = x4 * x;
        let a = x2 / T::lit(2.0) - x3 / T::lit(6.0) + x4 / T::lit(24.0) - x5 / T::lit(120.0);
        let b = x2 / T::lit(2.0) - x3 / T::lit(2.0) + T::lit(7.0) * x4 / T::lit(24.0) - x5 / T::lit(8.0);
        (one_minus, a, b)
    } else {
        let half_two = -(-(x + x)).exp_m1() / T::lit(2.0);
        (one_minus, x - one_minus, one_minus - half_two)
    }
}

/// Closed-form solution of
/// `q' = p/m, p' = -g p, sqq' = 2 sqp/m + 2 Dqq, sqp' = spp/m - g sqp,
/// spp' = -2 g spp + 2 Dpp`.
pub fn evolve_moments<T: Real>(s: &OneParticleGaussian<T>, params: &BrownianParams<T>, t: T) -> Result<OneParticleGaussian<T>> {
    params.validate()?;
    if !(t >= T::zero()) {
        return Err(BrownianError::NegativeTime(t.as_f64()));
    }
    if t == T::zero() {
        return Ok(*s);
    }
    let (m, g) = (params.mass, params.gamma);
    let two = T::lit(2.0);
    let x = g * t;
    let (om, lin, mix) = decay_terms(x);
    let decay = T::one() - om;
    let e1 = om / g;
    let b = params.d_pp / g;
    let a = s.spp - b;
    let p = s.p * decay;
    let q = s.q + s.p * e1 / m;
    let spp = s.spp * decay * decay + b * (T::one() - decay * decay);
    let sqp = decay * s.sqp + (a * decay * e1 + b * e1) / m;
    // int_0^t sqp = sqp0 E1 + A (E1 - E2) / (m g) + B (t - E1) / (m g)
    let int_sqp = s.sqp * e1 + (a * mix / g + b * lin / g) / (m * g);
    let sqq = s.sqq + two * int_sqp / m + two * params.d_qq * t;
    Ok(OneParticleGaussian { q, p, sqq, sqp, spp })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionFit {
    pub d_fit: f64,
    pub intercept: f64,
    /// Largest fit residual relative to the fitted range of `sigma_qq`.
    pub residual: f64,
    /// The grid does not reach from `10 / gamma` to `100 / gamma`.
    pub short_grid: bool,
}

/// Fits `sigma_qq(t) = 2 D t + c` on `t_grid`.
pub fn diffusion_constant_fit<T: Real>(initial: &OneParticleGaussian<T>, params: &BrownianParams<T>, t_grid: &[T]) -> Result<DiffusionFit> {
    if t_grid.len() < 3 || t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid[0] < T::zero() {
        return Err(BrownianError::BadTimeGrid);
    }
    let ts: Vec<f64> = t_grid.iter().map(|t| t.as_f64()).collect();
    let ys = t_grid
        .iter()
        .map(|&t| evolve_moments(initial, params, t).map(|s| s.sqq.as_f64()))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_line(&ts, &ys);
    let g = params.gamma.as_f64();
    let span = ys[ys.len() - 1] - ys[0];
    let slack = 1e-9;
    Ok(DiffusionFit {
        d_fit: fit.slope / 2.0,
        intercept: fit.intercept,
        residual: fit.max_residual / span.abs(),
        short_grid: ts[0] * g < 10.0 - slack || ts[ts.len() - 1] * g < 100.0 - slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub t: f64,
    pub sqq: f64,
    pub sqp: f64,
    pub spp: f64,
    /// `|| d_t n - D d_x^2 n || / || d_t n ||` over interior grid points.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCheckReport {
    pub num_particles: usize,
    pub diffusion_constant: f64,
    pub rows: Vec<ResidualRow>,
}

impl DensityCheckReport {
    /// CSV with columns `t,sigma_qq,sigma_qp,sigma_pp,residual`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,sigma_qq,sigma_qp,sigma_pp,residual")?;
        for r in &self.rows {
            writeln!(w, "{:e},{:e},{:e},{:e},{:e}", r.t, r.sqq, r.sqp, r.spp, r.residual)?;
        }
        Ok(())
    }

    pub fn is_monotone_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].residual < w[0].residual)
    }
}

/// Checks that `n(x, t) = N p_1(x, t)` obeys `d_t n = D d_x^2 n` with the
/// supplied `D`, using finite differences on `x_grid` and in time.
pub fn product_density_check<T: Real>(
    initial: &OneParticleGaussian<T>,
    params: &BrownianParams<T>,
    num_particles: usize,
    diffusion_constant: f64,
    x_grid: &[T],
    t_grid: &[T],
) -> Result<DensityCheckReport> {
    params.validate()?;
    if num_particles == 0 {
        return Err(BrownianError::InvalidParams("need at least one particle".into()));
    }
    let xs: Vec<f64> = x_grid.iter().map(|x| x.as_f64()).collect();
    if xs.len() < 5 {
        return Err(BrownianError::BadSpaceGrid);
    }
    let dx = xs[1] - xs[0];
    if !(dx > 0.0) || xs.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.max(1.0)) {
        return Err(BrownianError::BadSpaceGrid);
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > T::zero())) {
        return Err(BrownianError::BadTimeGrid);
    }
    // n = N p_1 and the residual is a ratio, so N drops out; working on p_1
    // keeps it exactly N-independent in floating point too.
    let dt = 1e-3 / params.gamma.as_f64();
    let density = |t: f64| -> Result<Vec<f64>> {
        let s = evolve_moments(initial, params, T::lit(t))?;
        Ok(x_grid.iter().map(|&x| s.position_density(x).as_f64()).collect())
    };
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let tf = t.as_f64();
        let s = evolve_moments(initial, params, t)?;
        let width = s.sqq.as_f64().sqrt();
        if dx > 0.25 * width {
            return Err(BrownianError::Unresolved { dx, width, t: tf });
        }
        let h = dt.min(0.5 * tf);
        let now = density(tf)?;
        let plus = density(tf + h)?;
        let minus = density(tf - h)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 1..xs.len() - 1 {
            let nt = (plus[i] - minus[i]) / (2.0 * h);
            let nxx = (now[i + 1] - 2.0 * now[i] + now[i - 1]) / (dx * dx);
            num += (nt - diffusion_constant * nxx).powi(2);
            den += nt * nt;
        }
        rows.push(ResidualRow {
            t: tf,
            sqq: s.sqq.as_f64(),
            sqp: s.sqp.as_f64(),
            spp: s.spp.as_f64(),
            residual: (num / den).sqrt(),
        });
    }
    Ok(DensityCheckReport { num_particles, diffusion_constant, rows })
}
