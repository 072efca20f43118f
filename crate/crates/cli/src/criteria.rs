//! Tolerances of the acceptance battery. Report rows and the acceptance
//! suite both read them from here.

/// Largest normalized off-diagonal `|D|` when every family commutes with `H`.
pub const EXACT_DECOHERENCE: f64 = 1e-10;
/// Entrywise agreement with the operator-chain oracle.
pub const ORACLE_AGREEMENT: f64 = 1e-11;
/// `|sum_a p(a) - 1|`.
pub const PROBABILITY_TOTAL: f64 = 1e-10;
/// Slack on `residual <= interference bound` for coarse-grained cells.
pub const COARSE_GRAIN_SLACK: f64 = 1e-12;
/// Log-log slope of the uncorrelated peaking ratio against `N`.
pub const PEAKING_SLOPE: f64 = 0.05;
/// Log-log slope of the quadrature ratio against `V`.
pub const VOLUME_SLOPE: f64 = 0.1;
/// Ratio of an uncorrelated ensemble.
pub const UNCORRELATED_RATIO: f64 = 1e-10;
/// Relative error of the constant-kernel prefactor.
pub const PREFACTOR_RELATIVE: f64 = 0.1;
/// Closed-form chain variance against sampling, in standard errors.
pub const CHAIN_SAMPLING_SIGMAS: f64 = 3.0;
/// Log-log slope of `|small_k_ratio - 1|` against `k`.
pub const SMALL_K_SLOPE: f64 = 0.1;
/// `|small_k_ratio - 1|` at `k sigma_q = 1e-4`.
pub const SMALL_K_RATIO: f64 = 1e-6;
/// Relative error of the fitted diffusion constant.
pub const DIFFUSION_CONSTANT_RELATIVE: f64 = 0.02;
/// Diffusion-equation residual for `t >= 10 / gamma`.
pub const DIFFUSION_RESIDUAL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    /// Wall-clock budget in seconds, if any.
    pub budget_secs: Option<u64>,
}

pub const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, name: "exact-conservation decoherence", budget_secs: Some(10) },
    Criterion { id: 2, name: "decoherence functional matches operator chains", budget_secs: Some(60) },
    Criterion { id: 3, name: "probability sum rules", budget_secs: None },
    Criterion { id: 4, name: "uncorrelated peaking ratio ~ 1/N", budget_secs: Some(120) },
    Criterion { id: 5, name: "correlated variance ratio ~ L^dim/V", budget_secs: Some(300) },
    Criterion { id: 6, name: "chain density variance matches sampling", budget_secs: None },
    Criterion { id: 7, name: "small-k limit k^2 (Delta X)^2", budget_secs: None },
    Criterion { id: 8, name: "diffusion emerges at long times", budget_secs: Some(10) },
    Criterion { id: 9, name: "byte-identical artifacts on rerun", budget_secs: None },
];
