use crate::config::{ExperimentKind, Params};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub relation: &'static str,
    pub summary: &'static str,
    pub stochastic: bool,
    pub criteria: Vec<u8>,
    /// Every parameter key with its default.
    pub params: toml::Table,
}

fn describe(kind: ExperimentKind) -> (&'static str, &'static str, Vec<u8>) {
    match kind {
        ExperimentKind::ConservedDecoherence => (
            "decoherence functional of a conserved quantity",
            "superposition of two translation sectors; off-diagonal D vanishes",
            vec![1, 3],
        ),
        ExperimentKind::CoarseKScan => (
            "decoherence functional of the Fourier number density n(k)",
            "epsilon and probability sum rules for Re n(k) histories across k",
            vec![1, 3],
        ),
        ExperimentKind::PeakingVsN => (
            "product-state peaking (Delta n_V)^2 / <n_V>^2 ~ 1/N",
            "Monte Carlo window counts for uncorrelated ensembles over N",
            vec![4],
        ),
        ExperimentKind::GaussianKScan => (
            "harmonic-chain density variance (Delta n(k))^2 and its k^2 (Delta X)^2 limit",
            "closed-form n(k) moments of a chain ground state and the small-k ratio",
            vec![6, 7],
        ),
        ExperimentKind::VarianceScaling => (
            "correlated variance ratio ~ L^dim / V",
            "quadrature of the connected pair density over cubic windows",
            vec![5],
        ),
        ExperimentKind::DiffusionEmergence => (
            "number density of a Brownian product state obeys the diffusion equation",
            "moment flow, fitted D and the finite-difference diffusion residual",
            vec![8],
        ),
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    ExperimentKind::ALL
        .iter()
        .map(|&kind| {
            let (relation, summary, criteria) = describe(kind);
            CatalogEntry {
                kind: kind.name(),
                relation,
                summary,
                stochastic: kind.is_stochastic(),
                criteria,
                params: Params::default_for(kind).to_table(),
            }
        })
        .collect()
}

pub fn render_text(entries: &[CatalogEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(e.kind);
        out.push_str(if e.stochastic { "  (needs seed)\n" } else { "\n" });
        out.push_str(&format!("  relation: {}\n  {}\n  criteria: {:?}\n  params:\n", e.relation, e.summary, e.criteria));
        let body = toml::to_string(&e.params).expect("defaults serialize");
        for line in body.lines().filter(|l| !l.is_empty()) {
            out.push_str("    ");
            out.push_str(line);
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
