//! Plain Monte Carlo estimators.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

/// Mean and standard error of a sample.
pub fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Draws from N(mean, cov) via Cholesky, calling `visit` on each sample.
pub fn gaussian_samples(mean: &DVector<f64>, cov: &DMatrix<f64>, n: usize, seed: u64, mut visit: impl FnMut(&DVector<f64>)) {
    let l = cov.clone().cholesky().expect("covariance must be positive definite").l();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dim = mean.len();
    let mut z = DVector::zeros(dim);
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let x = mean + &l * &z;
        visit(&x);
    }
}

/// Window counts for `n` particles uniform on `[0, 1)` falling in
/// `[0, f)`, one count per sample.
pub fn uniform_window_counts(n: usize, f: f64, samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| (0..n).filter(|_| rng.random::<f64>() < f).count() as f64)
        .collect()
}
