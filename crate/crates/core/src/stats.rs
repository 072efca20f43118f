//! Small statistics toolkit: least-squares lines, block jackknife and
//! integrated autocorrelation times. Diagnostics are always carried in `f64`.

/// Result of a straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// One-sigma uncertainty of the slope.
    pub slope_err: f64,
    pub intercept_err: f64,
    /// Largest absolute residual of the fit.
    pub max_residual: f64,
}

/// Ordinary least squares. Slope uncertainty is estimated from the residual
/// scatter; it is zero for an exact line.
pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    fit_line_weighted(x, y, None)
}

/// Weighted least squares with per-point standard deviations `sigma`. When
/// `sigma` is `None` (or any sigma is non-positive) the fit is unweighted.
pub fn fit_line_weighted(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points");
    let weights: Vec<f64> = match sigma {
        Some(s) if s.iter().all(|&v| v > 0.0) => s.iter().map(|v| 1.0 / (v * v)).collect(),
        _ => vec![1.0; x.len()],
    };
    let sw: f64 = weights.iter().sum();
    let mx = x.iter().zip(&weights).map(|(a, w)| a * w).sum::<f64>() / sw;
    let my = y.iter().zip(&weights).map(|(a, w)| a * w).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((&xi, &yi), &w) in x.iter().zip(y).zip(&weights) {
        sxx += w * (xi - mx) * (xi - mx);
        sxy += w * (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut chi2 = 0.0;
    let mut max_residual: f64 = 0.0;
    for ((&xi, &yi), &w) in x.iter().zip(y).zip(&weights) {
        let r = yi - intercept - slope * xi;
        chi2 += w * r * r;
        max_residual = max_residual.max(r.abs());
    }
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let weighted = sigma.is_some() && weights.iter().any(|&w| w != 1.0);
    // With real weights the covariance is (X^T W X)^-1; otherwise scale by
    // the residual variance.
    let scale = if weighted { (chi2 / dof).max(1.0) } else { chi2 / dof };
    let slope_var = scale / sxx;
    let intercept_var = scale * (1.0 / sw + mx * mx / sxx);
    LineFit {
        slope,
        intercept,
        slope_err: slope_var.sqrt(),
        intercept_err: intercept_var.sqrt(),
        max_residual,
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by n).
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Delete-one-block jackknife of an arbitrary estimator over `data`.
///
/// Returns `(estimate on full data, jackknife standard error)`. Blocks are
/// contiguous, so serial correlation shorter than a block is absorbed.
pub fn block_jackknife<F>(data: &[f64], blocks: usize, estimator: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = data.len();
    let full = estimator(data);
    let blocks = blocks.clamp(2, n.max(2));
    if n < blocks {
        return (full, f64::NAN);
    }
    let bsize = n / blocks;
    let used = bsize * blocks;
    let mut leave_out = Vec::with_capacity(blocks);
    let mut buf = Vec::with_capacity(used);
    for b in 0..blocks {
        buf.clear();
        buf.extend_from_slice(&data[..b * bsize]);
        buf.extend_from_slice(&data[(b + 1) * bsize..used]);
        leave_out.push(estimator(&buf));
    }
    let m = mean(&leave_out);
    let var = leave_out.iter().map(|v| (v - m) * (v - m)).sum::<f64>() * (blocks as f64 - 1.0)
        / blocks as f64;
    (full, var.sqrt())
}

/// Integrated autocorrelation time with Sokal's automatic window (c = 5).
///
/// Returns `(tau_int, window)`; `tau_int = 0.5` for white noise. A window that
/// reaches `series.len() / 4` means the estimate is unreliable.
pub fn integrated_autocorrelation(series: &[f64]) -> (f64, usize) {
    let n = series.len();
    if n < 4 {
        return (0.5, 0);
    }
    let m = mean(series);
    let c0 = series.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return (0.5, 0);
    }
    let mut tau = 0.5;
    let max_lag = n / 4;
    for lag in 1..=max_lag {
        let c = series[..n - lag]
            .iter()
            .zip(&series[lag..])
            .map(|(a, b)| (a - m) * (b - m))
            .sum::<f64>()
            / n as f64;
        tau += c / c0;
        if (lag as f64) >= 5.0 * tau {
            return (tau.max(0.5), lag);
        }
    }
    (tau.max(0.5), max_lag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = fit_line(&x, &y);
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!((f.intercept - 2.0).abs() < 1e-14);
        assert!(f.slope_err < 1e-12);
    }

    #[test]
    fn jackknife_of_mean_matches_standard_error() {
        let data: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 1000.0).collect();
        let (m, err) = block_jackknife(&data, 1000, mean);
        let se = (variance(&data) / 999.0).sqrt();
        assert!((m - mean(&data)).abs() < 1e-15);
        assert!((err - se).abs() / se < 1e-6);
    }

    #[test]
    fn white_noise_has_unit_half_tau() {
        let data: Vec<f64> = (0..4000u64)
            .map(|i| (crate::rng::derive_seed(3, i) >> 11) as f64 / (1u64 << 53) as f64)
            .collect();
        let (tau, _) = integrated_autocorrelation(&data);
        assert!((tau - 0.5).abs() < 0.15, "tau = {tau}");
    }
}
