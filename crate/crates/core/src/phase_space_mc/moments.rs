use super::error::{PhaseSpaceError, Result};
use super::sampler::CorrelatedEnsemble;
use super::window::WindowRegion;
use crate::stats::block_jackknife;

pub const JACKKNIFE_BLOCKS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMoments {
    pub mean: f64,
    pub mean_err: f64,
    pub variance: f64,
    pub variance_err: f64,
    /// `variance / mean^2`.
    pub ratio: f64,
    pub ratio_err: f64,
}

/// `n_V = sum_j delta_V(q_j)` for every stored configuration.
pub fn window_counts(ens: &CorrelatedEnsemble, w: &WindowRegion) -> Result<Vec<f64>> {
    if w.dim() != ens.dim {
        return Err(PhaseSpaceError::DimensionMismatch { expected: ens.dim, got: w.dim() });
    }
    Ok((0..ens.n_samples)
        .map(|s| ens.config(s).chunks(ens.dim).filter(|q| w.contains(q)).count() as f64)
        .collect())
}

fn var(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
}

fn avg(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean and variance of the window count, with block-jackknife errors.
pub fn density_moments(ens: &CorrelatedEnsemble, w: &WindowRegion) -> Result<DensityMoments> {
    let counts = window_counts(ens, w)?;
    Ok(moments_of_counts(&counts))
}

pub fn moments_of_counts(counts: &[f64]) -> DensityMoments {
    let (mean, mean_err) = block_jackknife(counts, JACKKNIFE_BLOCKS, avg);
    let (variance, variance_err) = block_jackknife(counts, JACKKNIFE_BLOCKS, var);
    let (ratio, ratio_err) = block_jackknife(counts, JACKKNIFE_BLOCKS, |xs| {
        let m = avg(xs);
        var(xs) / (m * m)
    });
    DensityMoments { mean, mean_err, variance, variance_err, ratio, ratio_err }
}
