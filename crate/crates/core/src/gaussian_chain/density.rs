use super::error::{GaussianError, Result};
use super::state::GaussianState;
use crate::scalar::{modulus_sq, phase, Complex, Real};
use std::io::Write;

/// Gaussian characteristic function `<exp(i k q_j)>`.
pub fn char_one_mode<T: Real>(state: &GaussianState<T>, j: usize, k: T) -> Complex<T> {
    let half = T::lit(0.5);
    phase(k * state.mean[j]) * (-half * k * k * state.sigma_q(j, j)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NkMoments<T: Real> {
    pub mean: Complex<T>,
    /// Real part of the double sum.
    pub variance: T,
    /// Imaginary part left over by rounding; zero in exact arithmetic.
    pub imag_residue: T,
}

/// Mean and variance of `n(k) = sum_j exp(i k q_j)`:
/// `var = sum_{j,l} <e^{ikq_j}> <e^{-ikq_l}> (exp(k^2 sigma_jl) - 1)`.
pub fn n_k_moments<T: Real>(state: &GaussianState<T>, k: T) -> NkMoments<T> {
    let m = state.num_modes();
    let chi: Vec<Complex<T>> = (0..m).map(|j| char_one_mode(state, j, k)).collect();
    let mean = chi.iter().fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
    let k2 = k * k;
    let mut var = Complex::new(T::zero(), T::zero());
    for j in 0..m {
        for l in 0..m {
            let g = (k2 * state.sigma_q(j, l)).exp_m1();
            var += chi[j] * chi[l].conj() * g;
        }
    }
    NkMoments { mean, variance: var.re, imag_residue: var.im }
}

/// `(Delta n(k))^2 / (k^2 (Delta X)^2)` with `X = sum_j q_j`; tends to 1 as
/// `k -> 0`.
pub fn small_k_ratio<T: Real>(state: &GaussianState<T>, k: T) -> Result<T> {
    if k == T::zero() {
        return Err(GaussianError::ZeroWavenumber);
    }
    let m = state.num_modes();
    let mut dx2 = T::zero();
    for j in 0..m {
        for l in 0..m {
            dx2 += state.sigma_q(j, l);
        }
    }
    if dx2 <= T::zero() {
        return Err(GaussianError::ZeroCenterOfMass);
    }
    Ok(n_k_moments(state, k).variance / (k * k * dx2))
}

/// One row of a `k` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow<T: Real> {
    pub k: T,
    pub moments: NkMoments<T>,
    /// `(Delta n)^2 / |<n>|^2`; infinite where the mean vanishes.
    pub ratio: T,
}

pub fn k_scan<T: Real>(state: &GaussianState<T>, ks: &[T]) -> Vec<ScanRow<T>> {
    ks.iter()
        .map(|&k| {
            let moments = n_k_moments(state, k);
            let m2 = modulus_sq(moments.mean);
            let ratio = if m2 > T::zero() { moments.variance / m2 } else { T::max_value().unwrap_or(T::one()) };
            ScanRow { k, moments, ratio }
        })
        .collect()
}

/// CSV with columns `k,mean_re,mean_im,variance,ratio`.
pub fn write_scan_csv<T: Real, W: Write>(rows: &[ScanRow<T>], mut w: W) -> std::io::Result<()> {
    writeln!(w, "k,mean_re,mean_im,variance,ratio")?;
    for r in rows {
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{:e}",
            r.k.as_f64(),
            r.moments.mean.re.as_f64(),
            r.moments.mean.im.as_f64(),
            r.moments.variance.as_f64(),
            r.ratio.as_f64()
        )?;
    }
    Ok(())
}
