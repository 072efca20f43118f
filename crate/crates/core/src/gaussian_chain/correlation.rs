use super::error::{GaussianError, Result};
use super::state::GaussianState;
use crate::exact_hilbert::Boundary;
use crate::scalar::Real;
use crate::stats::fit_line;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationFlag {
    /// Off-diagonal position covariances vanish; length reported as 0.
    NoCorrelation,
    /// Correlations do not decay across the chain; length reported as infinite.
    NoDecay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFit {
    pub length: f64,
    /// Largest absolute residual of the log-linear fit.
    pub residual: f64,
    pub flag: Option<CorrelationFlag>,
    /// Separations (in sites) that entered the fit.
    pub separations: Vec<usize>,
}

/// Mean `|sigma(q_j, q_l)|` at each lattice separation. On a ring the
/// separation is the shorter arc, up to `M / 2`.
pub fn correlation_profile<T: Real>(state: &GaussianState<T>, boundary: Boundary) -> Vec<f64> {
    let m = state.num_modes();
    let max_r = match boundary {
        Boundary::Periodic => m / 2,
        Boundary::Open => m - 1,
    };
    let mut sum = vec![0.0; max_r + 1];
    let mut count = vec![0usize; max_r + 1];
    for j in 0..m {
        for l in 0..m {
            let mut r = j.abs_diff(l);
            if boundary == Boundary::Periodic {
                r = r.min(m - r);
            }
            sum[r] += state.sigma_q(j, l).as_f64().abs();
            count[r] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect()
}

/// Exponential decay length of `|sigma(q_j, q_l)|` with lattice separation,
/// from least squares on `log |sigma|` over separations with
/// `|sigma| > 1e-12 sigma_0`.
pub fn correlation_length<T: Real>(state: &GaussianState<T>, spacing: T, boundary: Boundary) -> Result<CorrelationFit> {
    let m = state.num_modes();
    if m < 4 {
        return Err(GaussianError::TooFewModes(m));
    }
    let profile = correlation_profile(state, boundary);
    let s0 = profile[0];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut seps = Vec::new();
    for (r, &s) in profile.iter().enumerate() {
        if s > 1e-12 * s0 && s > 0.0 {
            xs.push(r as f64 * spacing.as_f64());
            ys.push(s.ln());
            seps.push(r);
        }
    }
    if seps.len() < 2 || seps.iter().all(|&r| r == 0) {
        return Ok(CorrelationFit { length: 0.0, residual: 0.0, flag: Some(CorrelationFlag::NoCorrelation), separations: seps });
    }
    let fit = fit_line(&xs, &ys);
    if fit.slope >= 0.0 {
        return Ok(CorrelationFit {
            length: f64::INFINITY,
            residual: fit.max_residual,
            flag: Some(CorrelationFlag::NoDecay),
            separations: seps,
        });
    }
    Ok(CorrelationFit { length: -1.0 / fit.slope, residual: fit.max_residual, flag: None, separations: seps })
}
