//! Direct midpoint quadrature for two correlated particles on a 1-D ring.

/// Moments of `n_V` for two particles with normalized joint density
/// `p(q1) p(q2) (1 + c(|q1 - q2|)) / Z` on a ring of length `box_len`, with
/// window `[lo, lo + width)`. Returns `(mean, variance, Z)`.
pub fn two_particle_window_moments(
    p: impl Fn(f64) -> f64,
    c: impl Fn(f64) -> f64,
    box_len: f64,
    lo: f64,
    width: f64,
    cells: usize,
) -> (f64, f64, f64) {
    let h = box_len / cells as f64;
    let xs: Vec<f64> = (0..cells).map(|i| (i as f64 + 0.5) * h).collect();
    let inside = |x: f64| (x - lo).rem_euclid(box_len) < width;
    let mut z = 0.0;
    let mut e_n = 0.0;
    let mut e_n2 = 0.0;
    for &x1 in &xs {
        for &x2 in &xs {
            let mut r = (x1 - x2).abs();
            r = r.min(box_len - r);
            let w = p(x1) * p(x2) * (1.0 + c(r)) * h * h;
            let n = inside(x1) as u8 as f64 + inside(x2) as u8 as f64;
            z += w;
            e_n += w * n;
            e_n2 += w * n * n;
        }
    }
    let mean = e_n / z;
    (mean, e_n2 / z - mean * mean, z)
}

/// Exact `int_V int_V c(|q1 - q2|)` for uniform density on an interval of
/// length `v` and constant kernel `c0` on `r < l`, `l <= v`.
pub fn constant_kernel_window_integral_1d(c0: f64, l: f64, v: f64) -> f64 {
    // 2 int_0^l (v - r) dr
    c0 * (2.0 * l * v - l * l)
}
