use super::distribution::{OneParticleDistribution, Shape};
use super::error::{PhaseSpaceError, Result};
use super::kernel::PairCorrelationModel;
use super::window::WindowRegion;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite rule on `[a, b]` split at `breaks`, `segments` pieces between
/// consecutive breaks.
fn composite(a: f64, b: f64, breaks: &[f64], segments: usize, rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = vec![a, b];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let h = (w[1] - w[0]) / segments as f64;
        for s in 0..segments {
            let lo = w[0] + s as f64 * h;
            for (&t, &wt) in rule.0.iter().zip(&rule.1) {
                out.push((lo + 0.5 * h * (t + 1.0), 0.5 * h * wt));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub radial_segments: usize,
    pub angular_segments: usize,
    pub order: usize,
    /// Table resolution for tabulated densities.
    pub lag_table: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { radial_segments: 24, angular_segments: 16, order: 8, lag_table: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureFlag {
    /// Fewer than 8 grid cells per correlation length.
    UnresolvedLength { cells_per_length: f64 },
    /// A window side spans fewer than 8 grid cells.
    UnresolvedWindow { cells_per_side: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    /// `int_V int_V (p2 - p p) / (int_V p)^2`.
    pub ratio: f64,
    pub numerator: f64,
    pub window_mass: f64,
    pub flags: Vec<QuadratureFlag>,
}

/// Windowed lag overlap along one axis,
/// `g(r) = int f(x) f(x + r) 1_W(x) 1_W(x + r) dx`, even in `r`.
enum AxisLag {
    Uniform { w: f64, box_len: f64 },
    Table { step: f64, values: Vec<f64> },
}

impl AxisLag {
    fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        match self {
            AxisLag::Uniform { w, box_len } => {
                let rp = r.rem_euclid(*box_len);
                ((w - rp).max(0.0) + (w - (box_len - rp)).max(0.0)) / (box_len * box_len)
            }
            AxisLag::Table { step, values } => {
                let u = r / step;
                let i = (u.floor() as usize).min(values.len() - 2);
                let t = u - i as f64;
                values[i] * (1.0 - t) + values[i + 1] * t
            }
        }
    }
}

/// Exact lag overlap for a piecewise-linear periodic profile.
fn table_lag(p: &OneParticleDistribution, f: &[f64], lo: f64, w: f64, r: f64) -> f64 {
    let b = p.box_len;
    let n = f.len();
    let h = b / n as f64;
    let interp = |x: f64| {
        let u = x.rem_euclid(b) / h;
        let i = (u.floor() as usize).min(n - 1);
        let t = u - i as f64;
        f[i] * (1.0 - t) + f[(i + 1) % n] * t
    };
    let (gx, gw) = ([-(1.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()], [1.0, 1.0]);
    let mut total = 0.0;
    for k in -1i32..=2 {
        let a0 = lo.max(lo - r + k as f64 * b);
        let a1 = (lo + w).min(lo - r + w + k as f64 * b);
        if a1 <= a0 {
            continue;
        }
        let mut pts = vec![a0, a1];
        let first = (a0 / h).floor() as i64;
        let last = (a1 / h).ceil() as i64;
        for c in first..=last {
            pts.push(c as f64 * h);
            pts.push(c as f64 * h - r);
        }
        let mut pts: Vec<f64> = pts.into_iter().filter(|&x| x >= a0 && x <= a1).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        for s in pts.windows(2) {
            let (m, half) = (0.5 * (s[0] + s[1]), 0.5 * (s[1] - s[0]));
            for (&t, &wt) in gx.iter().zip(&gw) {
                let x = m + half * t;
                total += wt * half * interp(x) * interp(x + r);
            }
        }
    }
    total
}

fn axis_lags(p: &OneParticleDistribution, w: &WindowRegion, max_r: f64, opts: &QuadratureOptions) -> Result<Vec<AxisLag>> {
    match &p.shape {
        Shape::Uniform => Ok(w.side.iter().map(|&s| AxisLag::Uniform { w: s, box_len: p.box_len }).collect()),
        Shape::Separable { factors, .. } => Ok(factors
            .iter()
            .enumerate()
            .map(|(a, f)| {
                let step = max_r / opts.lag_table as f64;
                let values = (0..=opts.lag_table + 1).map(|i| table_lag(p, f, w.lo[a], w.side[a], i as f64 * step)).collect();
                AxisLag::Table { step, values }
            })
            .collect()),
        Shape::Grid { .. } => Err(PhaseSpaceError::NotSeparable),
    }
}

fn check_window(p: &OneParticleDistribution, w: &WindowRegion) -> Result<()> {
    if w.dim() != p.dim {
        return Err(PhaseSpaceError::DimensionMismatch { expected: p.dim, got: w.dim() });
    }
    if (w.box_len - p.box_len).abs() > 1e-12 * p.box_len {
        return Err(PhaseSpaceError::InvalidWindow("window and distribution boxes differ".into()));
    }
    Ok(())
}

/// `int_{|r| < L} c(|r|) prod_a g_a(r_a) d^dim r`.
fn correlated_overlap(dim: usize, pair: &PairCorrelationModel, lags: &[AxisLag], radial_breaks: &[f64], opts: &QuadratureOptions) -> f64 {
    let rule = gauss_legendre(opts.order);
    let l = pair.length;
    let radial = composite(0.0, l, radial_breaks, opts.radial_segments, &rule);
    let half_pi = std::f64::consts::FRAC_PI_2;
    match dim {
        1 => 2.0 * radial.iter().map(|&(r, w)| w * pair.c(r) * lags[0].eval(r)).sum::<f64>(),
        2 => {
            let ang = composite(0.0, half_pi, &[], opts.angular_segments, &rule);
            4.0 * radial
                .iter()
                .map(|&(r, wr)| {
                    let c = pair.c(r);
                    if c == 0.0 {
                        return 0.0;
                    }
                    let s: f64 = ang.iter().map(|&(phi, wp)| wp * lags[0].eval(r * phi.cos()) * lags[1].eval(r * phi.sin())).sum();
                    wr * r * c * s
                })
                .sum::<f64>()
        }
        _ => {
            let ang = composite(0.0, half_pi, &[], opts.angular_segments, &rule);
            let us = composite(0.0, 1.0, &[], opts.angular_segments, &rule);
            8.0 * radial
                .iter()
                .map(|&(r, wr)| {
                    let c = pair.c(r);
                    if c == 0.0 {
                        return 0.0;
                    }
                    let mut s = 0.0;
                    for &(u, wu) in &us {
                        let st = (1.0 - u * u).max(0.0).sqrt();
                        let gz = lags[2].eval(r * u);
                        if gz == 0.0 {
                            continue;
                        }
                        for &(phi, wp) in &ang {
                            s += wu * wp * gz * lags[0].eval(r * st * phi.cos()) * lags[1].eval(r * st * phi.sin());
                        }
                    }
                    wr * r * r * c * s
                })
                .sum::<f64>()
        }
    }
}

/// Deterministic `N -> infinity` limit of `(Delta n_V)^2 / <n_V>^2`:
/// `int_V int_V p(q1) p(q2) c(|q1 - q2|) / (int_V p)^2`.
pub fn variance_ratio_quadrature(
    p1: &OneParticleDistribution,
    pair: Option<&PairCorrelationModel>,
    w: &WindowRegion,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    check_window(p1, w)?;
    let window_mass = p1.box_mass(&w.lo, &w.side);
    let mut flags = Vec::new();
    let Some(pair) = pair else {
        return Ok(QuadratureResult { ratio: 0.0, numerator: 0.0, window_mass, flags });
    };
    pair.validate(p1.box_len)?;
    if let Some(h) = p1.grid_spacing() {
        let cells = pair.length / h;
        if cells < 8.0 {
            flags.push(QuadratureFlag::UnresolvedLength { cells_per_length: cells });
        }
        let min_side = w.side.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_side / h < 8.0 {
            flags.push(QuadratureFlag::UnresolvedWindow { cells_per_side: min_side / h });
        }
    }
    if pair.is_zero() {
        return Ok(QuadratureResult { ratio: 0.0, numerator: 0.0, window_mass, flags });
    }
    let lags = axis_lags(p1, w, pair.length, opts)?;
    let mut breaks: Vec<f64> = Vec::new();
    for &s in &w.side {
        breaks.push(s);
        breaks.push(p1.box_len - s);
    }
    let numerator = correlated_overlap(p1.dim, pair, &lags, &breaks, opts);
    Ok(QuadratureResult { ratio: numerator / (window_mass * window_mass), numerator, window_mass, flags })
}

/// `int int p(q1) p(q2) c(|q1 - q2|)` over the whole box: how far
/// `p p (1 + c)` is from unit mass.
pub fn normalization_defect(p1: &OneParticleDistribution, pair: &PairCorrelationModel, opts: &QuadratureOptions) -> Result<f64> {
    let whole = WindowRegion::whole_box(p1.dim, p1.box_len);
    Ok(variance_ratio_quadrature(p1, Some(pair), &whole, opts)?.numerator)
}
