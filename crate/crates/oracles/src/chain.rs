//! Decoherence functional by explicit multiplication of operator chains.

use crate::{CMat, CVec, C64};

/// `exp(-i H t)` by Pade approximation.
pub fn unitary(h: &CMat, t: f64) -> CMat {
    (h * C64::new(0.0, -t)).exp()
}

/// `U(t_1), U(t_2 - t_1), ...` for a schedule.
pub fn step_unitaries(h: &CMat, times: &[f64]) -> Vec<CMat> {
    let mut prev = 0.0;
    times
        .iter()
        .map(|&t| {
            let u = unitary(h, t - prev);
            prev = t;
            u
        })
        .collect()
}

/// Full chain operator `C_a = P_{a_n} U(t_n - t_{n-1}) ... P_{a_1} U(t_1)`.
pub fn chain_operator(steps: &[CMat], families: &[Vec<CMat>], label: &[usize]) -> CMat {
    let dim = steps[0].nrows();
    let mut c = CMat::identity(dim, dim);
    for ((u, fam), &a) in steps.iter().zip(families).zip(label) {
        c = &fam[a] * u * c;
    }
    c
}

/// All history labels, first time most significant.
pub fn labels(families: &[Vec<CMat>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for f in families {
        out = out
            .into_iter()
            .flat_map(|l| {
                (0..f.len()).map(move |a| {
                    let mut n = l.clone();
                    n.push(a);
                    n
                })
            })
            .collect();
    }
    out
}

/// `D(a, a') = Tr(C_a |psi><psi| C_a'^dagger) = <C_a' psi | C_a psi>` for
/// every label pair, with each `C_a` built as an explicit operator product.
pub fn decoherence_matrix(psi: &CVec, h: &CMat, times: &[f64], families: &[Vec<CMat>]) -> CMat {
    let labels = labels(families);
    let steps = step_unitaries(h, times);
    let branches: Vec<CVec> = labels.iter().map(|l| chain_operator(&steps, families, l) * psi).collect();
    let n = labels.len();
    CMat::from_fn(n, n, |a, b| branches[b].dotc(&branches[a]))
}

/// `|| sum_{a in cell} C_a psi ||^2`.
pub fn cell_probability(psi: &CVec, h: &CMat, times: &[f64], families: &[Vec<CMat>], cell: &[Vec<usize>]) -> f64 {
    let dim = h.nrows();
    let steps = step_unitaries(h, times);
    let mut sum = CMat::zeros(dim, dim);
    for l in cell {
        sum += chain_operator(&steps, families, l);
    }
    (sum * psi).norm_squared()
}
