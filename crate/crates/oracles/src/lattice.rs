//! Brute-force lattice operators built from explicit Kronecker products.

use crate::{c, CMat};

/// `I (x) .. (x) A (x) .. (x) I` with `A` in slot `j` of `n` slots.
pub fn embed(a: &CMat, j: usize, n: usize) -> CMat {
    let d = a.nrows();
    let mut out = CMat::identity(1, 1);
    for slot in 0..n {
        let factor = if slot == j { a.clone() } else { CMat::identity(d, d) };
        out = out.kronecker(&factor);
    }
    out
}

/// Textbook tight-binding ring (or chain) plus a pair potential.
///
/// `phi(s_j, s_l)` returns the pair energy for two particles at the given
/// sites.
pub fn tight_binding_hamiltonian(
    n: usize,
    d: usize,
    hopping: f64,
    periodic: bool,
    phi: impl Fn(usize, usize) -> f64,
) -> CMat {
    let mut k = CMat::zeros(d, d);
    for s in 0..d {
        k[(s, s)] = c(2.0 * hopping);
    }
    for s in 0..d {
        let t = s + 1;
        if t < d {
            k[(s, t)] -= c(hopping);
            k[(t, s)] -= c(hopping);
        } else if periodic {
            k[(s, t % d)] -= c(hopping);
            k[(t % d, s)] -= c(hopping);
        }
    }
    let dim = d.pow(n as u32);
    let mut h = CMat::zeros(dim, dim);
    for j in 0..n {
        h += embed(&k, j, n);
    }
    // pair term via position-projector products
    for j in 0..n {
        for l in j + 1..n {
            for sj in 0..d {
                for sl in 0..d {
                    let mut pj = CMat::zeros(d, d);
                    pj[(sj, sj)] = c(1.0);
                    let mut pl = CMat::zeros(d, d);
                    pl[(sl, sl)] = c(1.0);
                    h += embed(&pj, j, n) * embed(&pl, l, n) * c(phi(sj, sl));
                }
            }
        }
    }
    h
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn eigenvalues(h: &CMat) -> Vec<f64> {
    let mut e: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Counts basis configurations by how many particles sit in `window`.
pub fn occupation_histogram(n: usize, d: usize, window: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; n + 1];
    for idx in 0..d.pow(n as u32) {
        let mut rest = idx;
        let mut inside = 0;
        for _ in 0..n {
            if window.contains(&(rest % d)) {
                inside += 1;
            }
            rest /= d;
        }
        counts[inside] += 1;
    }
    counts
}
