//! Experiment configuration files.
//!
//! A config is TOML with a top-level `kind`, an optional `seed` and
//! `output_dir`, and a `[params]` table whose schema depends on the kind.
//! Omitted params take their defaults; unknown keys are rejected.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("TOML syntax: {0}")]
    Syntax(String),
    #[error("at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("`{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ConservedDecoherence,
    CoarseKScan,
    #[serde(rename = "peaking_vs_N")]
    PeakingVsN,
    GaussianKScan,
    VarianceScaling,
    DiffusionEmergence,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::ConservedDecoherence,
        ExperimentKind::CoarseKScan,
        ExperimentKind::PeakingVsN,
        ExperimentKind::GaussianKScan,
        ExperimentKind::VarianceScaling,
        ExperimentKind::DiffusionEmergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ConservedDecoherence => "conserved_decoherence",
            ExperimentKind::CoarseKScan => "coarse_k_scan",
            ExperimentKind::PeakingVsN => "peaking_vs_N",
            ExperimentKind::GaussianKScan => "gaussian_k_scan",
            ExperimentKind::VarianceScaling => "variance_scaling",
            ExperimentKind::DiffusionEmergence => "diffusion_emergence",
        }
    }

    /// Kinds that draw random numbers and therefore need a seed.
    pub fn is_stochastic(self) -> bool {
        matches!(self, ExperimentKind::ConservedDecoherence | ExperimentKind::PeakingVsN)
    }
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub params: toml::Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryChoice {
    #[default]
    Periodic,
    Open,
}

impl From<BoundaryChoice> for histories_core::exact_hilbert::Boundary {
    fn from(b: BoundaryChoice) -> Self {
        match b {
            BoundaryChoice::Periodic => Self::Periodic,
            BoundaryChoice::Open => Self::Open,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRule {
    #[default]
    LowerIndex,
    Split,
}

/// Lattice shared by the two exact-engine experiments. `pair_potential[r]` is
/// the pair energy at separation `r` sites (minimum image when periodic);
/// separations past the end of the list have zero energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeParams {
    pub num_particles: usize,
    pub num_sites: usize,
    pub spacing: f64,
    pub mass: f64,
    /// Overrides `hbar^2 / (2 m a^2)` when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hopping: Option<f64>,
    pub pair_potential: Vec<f64>,
    pub boundary: BoundaryChoice,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            num_particles: 2,
            num_sites: 6,
            spacing: 1.0,
            mass: 1.0,
            hopping: None,
            pair_potential: vec![0.7, 0.3],
            boundary: BoundaryChoice::Periodic,
        }
    }
}

impl LatticeParams {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.num_particles == 0 {
            return Err(invalid("params.lattice.num_particles", "must be at least 1"));
        }
        if self.num_sites < 2 {
            return Err(invalid("params.lattice.num_sites", "must be at least 2"));
        }
        let dim = (self.num_sites as f64).powi(self.num_particles as i32);
        if dim > 4096.0 {
            return Err(invalid("params.lattice", format!("Hilbert dimension {dim} exceeds 4096")));
        }
        positive("params.lattice.spacing", self.spacing)?;
        positive("params.lattice.mass", self.mass)?;
        if let Some(j) = self.hopping {
            if !(j.is_finite() && j >= 0.0) {
                return Err(invalid("params.lattice.hopping", "must be finite and nonnegative"));
            }
        }
        if self.pair_potential.iter().any(|v| !v.is_finite()) {
            return Err(invalid("params.lattice.pair_potential", "entries must be finite"));
        }
        Ok(())
    }

    pub fn spec(&self) -> histories_core::LatticeSpec {
        use histories_core::exact_hilbert::LatticeSpec;
        let d = self.num_sites;
        let periodic = self.boundary == BoundaryChoice::Periodic;
        let table = self.pair_potential.clone();
        let mut spec = LatticeSpec::new(self.num_particles, d, self.spacing, self.mass)
            .with_boundary(self.boundary.into())
            .with_pair_function(move |r| {
                let r = if periodic { r.min(d - r) } else { r };
                table.get(r).copied().unwrap_or(0.0)
            });
        if let Some(j) = self.hopping {
            spec = spec.with_hopping(j);
        }
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConservedDecoherenceParams {
    pub lattice: LatticeParams,
    pub times: Vec<f64>,
}

impl Default for ConservedDecoherenceParams {
    fn default() -> Self {
        Self { lattice: LatticeParams::default(), times: vec![0.4, 1.1, 2.3] }
    }
}

/// One-particle wavepacket `exp(-(s - center)^2 / (4 width^2) + i momentum s)`
/// over lattice sites `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WavepacketParams {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
}

impl Default for WavepacketParams {
    fn default() -> Self {
        Self { center: 1.5, width: 1.0, momentum: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoarseKScanParams {
    pub lattice: LatticeParams,
    pub times: Vec<f64>,
    /// Bin width for the spectral projectors of `Re n(k)`.
    pub bin_width: f64,
    /// Fourier modes `n` in `k = 2 pi n / (d a)`; empty means `0..=d/2`.
    pub modes: Vec<i64>,
    pub wavepacket: WavepacketParams,
}

impl Default for CoarseKScanParams {
    fn default() -> Self {
        Self {
            lattice: LatticeParams::default(),
            times: vec![0.5, 1.5, 2.5],
            bin_width: 0.5,
            modes: Vec::new(),
            wavepacket: WavepacketParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeakingParams {
    pub dim: usize,
    pub box_len: f64,
    pub window_lo: Vec<f64>,
    pub window_side: Vec<f64>,
    pub particle_numbers: Vec<usize>,
    pub samples: usize,
}

impl Default for PeakingParams {
    fn default() -> Self {
        Self {
            dim: 1,
            box_len: 1.0,
            window_lo: vec![0.0],
            window_side: vec![0.25],
            particle_numbers: vec![4, 8, 16, 32, 64, 128, 256, 512],
            samples: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaussianKScanParams {
    pub num_modes: usize,
    pub mass: f64,
    pub omega0: f64,
    pub coupling: f64,
    pub spacing: f64,
    pub boundary: BoundaryChoice,
    /// Evolve the ground state for this long under `quench_omega0`.
    pub time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quench_omega0: Option<f64>,
    pub k_max: f64,
    pub k_points: usize,
}

impl Default for GaussianKScanParams {
    fn default() -> Self {
        Self {
            num_modes: 8,
            mass: 1.0,
            omega0: 0.5,
            coupling: 1.0,
            spacing: 1.0,
            boundary: BoundaryChoice::Periodic,
            time: 0.0,
            quench_omega0: None,
            k_max: std::f64::consts::PI,
            k_points: 65,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    None,
    #[default]
    Constant,
    Triangular,
    TruncatedGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelParams {
    pub shape: KernelChoice,
    pub length: f64,
    pub strength: f64,
    /// Width of the truncated Gaussian; defaults to `length / 3`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self { shape: KernelChoice::Constant, length: 1.0, strength: 0.5, sigma: None }
    }
}

impl KernelParams {
    pub fn model(&self) -> Option<histories_core::phase_space_mc::PairCorrelationModel> {
        use histories_core::phase_space_mc::PairCorrelationModel as K;
        match self.shape {
            KernelChoice::None => None,
            KernelChoice::Constant => Some(K::constant(self.length, self.strength)),
            KernelChoice::Triangular => Some(K::triangular(self.length, self.strength)),
            KernelChoice::TruncatedGaussian => {
                Some(K::truncated_gaussian(self.length, self.strength, self.sigma.unwrap_or(self.length / 3.0)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VarianceScalingParams {
    pub dim: usize,
    pub kernel: KernelParams,
    /// Smallest and largest window volume in units of `length^dim`.
    pub v_min: f64,
    pub v_max: f64,
    pub points: usize,
    /// Defaults to twice the largest window side plus four lengths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_len: Option<f64>,
}

impl Default for VarianceScalingParams {
    fn default() -> Self {
        Self { dim: 1, kernel: KernelParams::default(), v_min: 8.0, v_max: 512.0, points: 7, box_len: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionParams {
    pub mass: f64,
    pub gamma: f64,
    pub d_pp: f64,
    pub d_qq: f64,
    pub num_particles: usize,
    pub q0: f64,
    pub p0: f64,
    pub sigma_qq0: f64,
    pub sigma_qp0: f64,
    /// Defaults to the stationary value `d_pp / gamma`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_pp0: Option<f64>,
    /// Fit window in units of `1 / gamma`.
    pub fit_from: f64,
    pub fit_to: f64,
    pub fit_points: usize,
    /// Residual grid in units of `1 / gamma`, log spaced.
    pub check_from: f64,
    pub check_to: f64,
    pub check_points: usize,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            gamma: 1.0,
            d_pp: 1.0,
            d_qq: 0.0,
            num_particles: 10,
            q0: 0.0,
            p0: 1.0,
            sigma_qq0: 1.0,
            sigma_qp0: 0.0,
            sigma_pp0: None,
            fit_from: 10.0,
            fit_to: 100.0,
            fit_points: 46,
            check_from: 0.1,
            check_to: 50.0,
            check_points: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    ConservedDecoherence(ConservedDecoherenceParams),
    CoarseKScan(CoarseKScanParams),
    PeakingVsN(PeakingParams),
    GaussianKScan(GaussianKScanParams),
    VarianceScaling(VarianceScalingParams),
    DiffusionEmergence(DiffusionParams),
}

impl Params {
    pub fn default_for(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::ConservedDecoherence => Params::ConservedDecoherence(Default::default()),
            ExperimentKind::CoarseKScan => Params::CoarseKScan(Default::default()),
            ExperimentKind::PeakingVsN => Params::PeakingVsN(Default::default()),
            ExperimentKind::GaussianKScan => Params::GaussianKScan(Default::default()),
            ExperimentKind::VarianceScaling => Params::VarianceScaling(Default::default()),
            ExperimentKind::DiffusionEmergence => Params::DiffusionEmergence(Default::default()),
        }
    }

    fn parse(kind: ExperimentKind, table: &toml::Table) -> Result<Self, ConfigError> {
        Ok(match kind {
            ExperimentKind::ConservedDecoherence => Params::ConservedDecoherence(from_table(table)?),
            ExperimentKind::CoarseKScan => Params::CoarseKScan(from_table(table)?),
            ExperimentKind::PeakingVsN => Params::PeakingVsN(from_table(table)?),
            ExperimentKind::GaussianKScan => Params::GaussianKScan(from_table(table)?),
            ExperimentKind::VarianceScaling => Params::VarianceScaling(from_table(table)?),
            ExperimentKind::DiffusionEmergence => Params::DiffusionEmergence(from_table(table)?),
        })
    }

    pub fn to_table(&self) -> toml::Table {
        let t = match self {
            Params::ConservedDecoherence(p) => toml::Table::try_from(p),
            Params::CoarseKScan(p) => toml::Table::try_from(p),
            Params::PeakingVsN(p) => toml::Table::try_from(p),
            Params::GaussianKScan(p) => toml::Table::try_from(p),
            Params::VarianceScaling(p) => toml::Table::try_from(p),
            Params::DiffusionEmergence(p) => toml::Table::try_from(p),
        };
        t.expect("parameter structs serialize to tables")
    }

    fn validate(&self) -> Result<(), ConfigError> {
        match self {
            Params::ConservedDecoherence(p) => {
                p.lattice.validate()?;
                times("params.times", &p.times)
            }
            Params::CoarseKScan(p) => {
                p.lattice.validate()?;
                times("params.times", &p.times)?;
                positive("params.bin_width", p.bin_width)?;
                positive("params.wavepacket.width", p.wavepacket.width)?;
                if !(p.wavepacket.center.is_finite() && p.wavepacket.momentum.is_finite()) {
                    return Err(invalid("params.wavepacket", "center and momentum must be finite"));
                }
                Ok(())
            }
            Params::PeakingVsN(p) => {
                if !(1..=3).contains(&p.dim) {
                    return Err(invalid("params.dim", "must be 1, 2 or 3"));
                }
                positive("params.box_len", p.box_len)?;
                if p.window_lo.len() != p.dim || p.window_side.len() != p.dim {
                    return Err(invalid("params.window_lo", "window_lo and window_side need `dim` entries"));
                }
                if p.window_side.iter().any(|&s| !(s > 0.0 && s <= p.box_len)) {
                    return Err(invalid("params.window_side", "sides must lie in (0, box_len]"));
                }
                if p.particle_numbers.len() < 4 || p.particle_numbers.iter().any(|&n| n < 1) {
                    return Err(invalid("params.particle_numbers", "need at least 4 positive particle numbers"));
                }
                if p.samples < 100 {
                    return Err(invalid("params.samples", "need at least 100 samples"));
                }
                Ok(())
            }
            Params::GaussianKScan(p) => {
                if p.num_modes < 2 {
                    return Err(invalid("params.num_modes", "need at least 2 modes"));
                }
                positive("params.mass", p.mass)?;
                positive("params.omega0", p.omega0)?;
                positive("params.spacing", p.spacing)?;
                positive("params.k_max", p.k_max)?;
                if !(p.coupling.is_finite() && p.coupling >= 0.0) {
                    return Err(invalid("params.coupling", "must be finite and nonnegative"));
                }
                if !(p.time.is_finite() && p.time >= 0.0) {
                    return Err(invalid("params.time", "must be finite and nonnegative"));
                }
                if let Some(w) = p.quench_omega0 {
                    positive("params.quench_omega0", w)?;
                }
                if p.k_points < 2 {
                    return Err(invalid("params.k_points", "need at least 2 points"));
                }
                Ok(())
            }
            Params::VarianceScaling(p) => {
                if !(1..=3).contains(&p.dim) {
                    return Err(invalid("params.dim", "must be 1, 2 or 3"));
                }
                positive("params.kernel.length", p.kernel.length)?;
                if !(p.kernel.strength.is_finite() && p.kernel.strength >= -1.0) {
                    return Err(invalid("params.kernel.strength", "must be finite and at least -1"));
                }
                if let Some(s) = p.kernel.sigma {
                    positive("params.kernel.sigma", s)?;
                }
                positive("params.v_min", p.v_min)?;
                if !(p.v_max > p.v_min && p.v_max.is_finite()) {
                    return Err(invalid("params.v_max", "must exceed v_min"));
                }
                if p.points < 4 {
                    return Err(invalid("params.points", "need at least 4 points"));
                }
                if let Some(b) = p.box_len {
                    positive("params.box_len", b)?;
                }
                Ok(())
            }
            Params::DiffusionEmergence(p) => {
                positive("params.mass", p.mass)?;
                positive("params.gamma", p.gamma)?;
                positive("params.d_pp", p.d_pp)?;
                if !(p.d_qq.is_finite() && p.d_qq >= 0.0) {
                    return Err(invalid("params.d_qq", "must be finite and nonnegative"));
                }
                if p.num_particles == 0 {
                    return Err(invalid("params.num_particles", "must be at least 1"));
                }
                positive("params.sigma_qq0", p.sigma_qq0)?;
                if let Some(s) = p.sigma_pp0 {
                    positive("params.sigma_pp0", s)?;
                }
                if !(p.fit_from >= 0.0 && p.fit_to > p.fit_from && p.fit_points >= 3) {
                    return Err(invalid("params.fit_from", "need 0 <= fit_from < fit_to and fit_points >= 3"));
                }
                if !(p.check_from > 0.0 && p.check_to > p.check_from && p.check_points >= 2) {
                    return Err(invalid("params.check_from", "need 0 < check_from < check_to and check_points >= 2"));
                }
                Ok(())
            }
        }
    }
}

fn positive(key: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(key, format!("must be finite and positive, got {x}")))
    }
}

fn times(key: &str, ts: &[f64]) -> Result<(), ConfigError> {
    if ts.is_empty() || ts.iter().any(|t| !t.is_finite()) || ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid(key, "need a nonempty, strictly increasing list of finite times"));
    }
    Ok(())
}

fn from_table<T: DeserializeOwned>(table: &toml::Table) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(toml::Value::Table(table.clone())).map_err(|e| ConfigError::Schema {
        path: format!("params.{}", e.path()),
        message: e.inner().to_string(),
    })
}

/// A validated config with defaults filled in and the seed settled.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub kind: ExperimentKind,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub params: Params,
}

impl ResolvedConfig {
    /// Canonical TOML that re-validates to the same config.
    pub fn echo(&self) -> String {
        let cfg = ExperimentConfig {
            kind: self.kind,
            seed: self.seed,
            output_dir: self.output_dir.clone(),
            params: self.params.to_table(),
        };
        toml::to_string(&cfg).expect("config serializes")
    }

    /// The seed of a stochastic kind; deterministic kinds get 0.
    pub fn seed_or_zero(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

pub fn parse_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Schema { path: if path == "." { "<root>".into() } else { path }, message: e.inner().to_string() }
    })
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
    parse_str(&text)
}

/// Applies a seed override, fills defaults and checks every key.
pub fn resolve(cfg: &ExperimentConfig, seed_override: Option<u64>) -> Result<ResolvedConfig, ConfigError> {
    let params = Params::parse(cfg.kind, &cfg.params)?;
    params.validate()?;
    let seed = seed_override.or(cfg.seed);
    if cfg.kind.is_stochastic() && seed.is_none() {
        return Err(invalid("seed", format!("{} draws random numbers and needs a seed (set `seed` or pass --seed)", cfg.kind.name())));
    }
    Ok(ResolvedConfig { kind: cfg.kind, seed, output_dir: cfg.output_dir.clone(), params })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_echo_round_trips() {
        for kind in ExperimentKind::ALL {
            let r = ResolvedConfig { kind, seed: Some(3), output_dir: None, params: Params::default_for(kind) };
            let again = resolve(&parse_str(&r.echo()).unwrap(), None).unwrap();
            assert_eq!(again, r);
        }
    }

    #[test]
    fn unknown_kind_is_a_schema_error() {
        let e = parse_str("kind = \"nope\"\n").unwrap_err();
        assert!(matches!(e, ConfigError::Schema { ref path, .. } if path == "kind"), "{e}");
    }

    #[test]
    fn unknown_param_names_its_path() {
        let cfg = parse_str("kind = \"variance_scaling\"\n[params.kernel]\nlenght = 2.0\n").unwrap();
        let e = resolve(&cfg, None).unwrap_err();
        assert!(matches!(e, ConfigError::Schema { ref path, .. } if path.starts_with("params.kernel")), "{e}");
    }

    #[test]
    fn stochastic_kinds_need_a_seed() {
        let cfg = parse_str("kind = \"peaking_vs_N\"\n").unwrap();
        assert!(matches!(resolve(&cfg, None), Err(ConfigError::Invalid { ref key, .. }) if key == "seed"));
        assert_eq!(resolve(&cfg, Some(9)).unwrap().seed, Some(9));
    }

    #[test]
    fn bad_values_are_rejected() {
        let cfg = parse_str("kind = \"diffusion_emergence\"\n[params]\ngamma = -1.0\n").unwrap();
        assert!(matches!(resolve(&cfg, None), Err(ConfigError::Invalid { ref key, .. }) if key == "params.gamma"));
    }
}
