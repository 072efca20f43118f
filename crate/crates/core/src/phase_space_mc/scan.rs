use super::distribution::OneParticleDistribution;
use super::error::{PhaseSpaceError, Result};
use super::kernel::PairCorrelationModel;
use super::moments::density_moments;
use super::quadrature::{variance_ratio_quadrature, QuadratureFlag, QuadratureOptions};
use super::sampler::{sample_ensemble, SamplerOptions};
use super::window::WindowRegion;
use crate::rng::derive_seed;
use crate::stats::{fit_line_weighted, LineFit};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanVariable {
    N,
    V,
}

impl ScanVariable {
    pub fn name(self) -> &'static str {
        match self {
            ScanVariable::N => "N",
            ScanVariable::V => "V",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ScanConfig {
    /// Monte Carlo over particle numbers at a fixed window.
    Particles {
        p1: OneParticleDistribution,
        pair: Option<PairCorrelationModel>,
        window: WindowRegion,
        ns: Vec<usize>,
        n_samples: usize,
        seed: u64,
        sampler: SamplerOptions,
    },
    /// Quadrature over window volumes (cubes at the origin).
    Volumes {
        p1: OneParticleDistribution,
        pair: Option<PairCorrelationModel>,
        volumes: Vec<f64>,
        quadrature: QuadratureOptions,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub x: f64,
    pub ratio: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub variable: ScanVariable,
    pub rows: Vec<ScanRow>,
    /// Fit of `ln ratio` against `ln x`.
    pub fit: LineFit,
    /// Geometric mean of `ratio * x`.
    pub prefactor: f64,
    pub unconverged_points: Vec<f64>,
    pub quadrature_flags: Vec<(f64, QuadratureFlag)>,
}

impl ScanResult {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{},ratio,error", self.variable.name())?;
        for r in &self.rows {
            writeln!(w, "{:e},{:e},{:e}", r.x, r.ratio, r.error)?;
        }
        Ok(())
    }
}

pub fn scaling_scan(config: &ScanConfig) -> Result<ScanResult> {
    let mut unconverged = Vec::new();
    let mut qflags = Vec::new();
    let (variable, rows) = match config {
        ScanConfig::Particles { p1, pair, window, ns, n_samples, seed, sampler } => {
            if ns.len() < 4 {
                return Err(PhaseSpaceError::TooFewScanPoints(ns.len()));
            }
            let mut rows = Vec::with_capacity(ns.len());
            for &n in ns {
                let ens = sample_ensemble(p1, pair.as_ref(), n, *n_samples, derive_seed(*seed, n as u64), sampler)?;
                if !ens.meta.converged {
                    unconverged.push(n as f64);
                }
                let m = density_moments(&ens, window)?;
                rows.push(ScanRow { x: n as f64, ratio: m.ratio, error: m.ratio_err });
            }
            (ScanVariable::N, rows)
        }
        ScanConfig::Volumes { p1, pair, volumes, quadrature } => {
            if volumes.len() < 4 {
                return Err(PhaseSpaceError::TooFewScanPoints(volumes.len()));
            }
            let mut rows = Vec::with_capacity(volumes.len());
            for &v in volumes {
                let w = WindowRegion::cube(p1.dim, v, p1.box_len)?;
                let q = variance_ratio_quadrature(p1, pair.as_ref(), &w, quadrature)?;
                qflags.extend(q.flags.iter().map(|f| (v, *f)));
                rows.push(ScanRow { x: v, ratio: q.ratio, error: 0.0 });
            }
            (ScanVariable::V, rows)
        }
    };
    let xs: Vec<f64> = rows.iter().map(|r| r.x.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
    let sig: Vec<f64> = rows.iter().map(|r| r.error / r.ratio).collect();
    let weights = if sig.iter().all(|&s| s > 0.0 && s.is_finite()) { Some(sig.as_slice()) } else { None };
    let fit = fit_line_weighted(&xs, &ys, weights);
    let prefactor = (rows.iter().map(|r| (r.ratio * r.x).ln()).sum::<f64>() / rows.len() as f64).exp();
    Ok(ScanResult { variable, rows, fit, prefactor, unconverged_points: unconverged, quadrature_flags: qflags })
}
