//! Classical RK4 integration of linear moment equations with step halving.

use nalgebra::{DMatrix, DVector};

/// Fixed-step RK4 for `dy/dt = f(y)`.
pub fn rk4(f: &dyn Fn(&DVector<f64>) -> DVector<f64>, y0: &DVector<f64>, t: f64, steps: usize) -> DVector<f64> {
    let h = t / steps as f64;
    let mut y = y0.clone();
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&(&y + &k1 * (h / 2.0)));
        let k3 = f(&(&y + &k2 * (h / 2.0)));
        let k4 = f(&(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    y
}

/// Halves the step until two successive results agree to `rel_tol`
/// (relative to the largest component).
pub fn rk4_converged(
    f: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    y0: &DVector<f64>,
    t: f64,
    rel_tol: f64,
) -> DVector<f64> {
    let mut steps = 16;
    let mut prev = rk4(f, y0, t, steps);
    loop {
        steps *= 2;
        let next = rk4(f, y0, t, steps);
        let scale = next.amax().max(1e-300);
        if (&next - &prev).amax() / scale < rel_tol || steps > 1 << 22 {
            return next;
        }
        prev = next;
    }
}

/// Harmonic chain: Hamilton's equations for the mean and the Lyapunov flow
/// `dS/dt = A S + S A^T` for the phase-space covariance, with
/// `A = [[0, I/m], [-K, 0]]`. `y` packs the mean (2M) then S row-major.
pub fn chain_moments(k: &DMatrix<f64>, mass: f64, mean: &DVector<f64>, cov: &DMatrix<f64>, t: f64) -> (DVector<f64>, DMatrix<f64>) {
    let m = k.nrows();
    let n = 2 * m;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..m {
        a[(i, m + i)] = 1.0 / mass;
        for j in 0..m {
            a[(m + i, j)] = -k[(i, j)];
        }
    }
    let f = |y: &DVector<f64>| {
        let x = y.rows(0, n).into_owned();
        let s = DMatrix::from_row_slice(n, n, y.rows(n, n * n).as_slice());
        let dx = &a * x;
        let ds = &a * &s + &s * a.transpose();
        let mut out = DVector::zeros(n + n * n);
        out.rows_mut(0, n).copy_from(&dx);
        for r in 0..n {
            for c in 0..n {
                out[n + r * n + c] = ds[(r, c)];
            }
        }
        out
    };
    let mut y0 = DVector::zeros(n + n * n);
    y0.rows_mut(0, n).copy_from(mean);
    for r in 0..n {
        for c in 0..n {
            y0[n + r * n + c] = cov[(r, c)];
        }
    }
    let y = rk4_converged(&f, &y0, t, 1e-13);
    let mean_t = y.rows(0, n).into_owned();
    let cov_t = DMatrix::from_row_slice(n, n, y.rows(n, n * n).as_slice());
    (mean_t, cov_t)
}

/// One Brownian particle: `[q, p, sqq, sqp, spp]` under friction and
/// momentum diffusion, plus optional direct position diffusion `d_qq`.
pub fn brownian_moments(y0: [f64; 5], mass: f64, gamma: f64, d_pp: f64, d_qq: f64, t: f64) -> [f64; 5] {
    let f = |y: &DVector<f64>| {
        DVector::from_vec(vec![
            y[1] / mass,
            -gamma * y[1],
            2.0 * y[3] / mass + 2.0 * d_qq,
            y[4] / mass - gamma * y[3],
            -2.0 * gamma * y[4] + 2.0 * d_pp,
        ])
    };
    let y = rk4_converged(&f, &DVector::from_row_slice(&y0), t, 1e-12);
    [y[0], y[1], y[2], y[3], y[4]]
}
