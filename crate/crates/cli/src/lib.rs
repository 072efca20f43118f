//! Batch runner for the histories engines: config loading, experiment
//! dispatch, CSV artifacts and a JSON pass/fail report.

pub mod catalog;
pub mod config;
pub mod criteria;
pub mod experiments;
pub mod report;

use config::ResolvedConfig;
use experiments::{Artifact, EngineError};
use report::{Provenance, Report};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HISTORIES_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "histories-out";

#[derive(Debug, thiserror::Error)]
#[error("{kind}: {source}")]
pub struct RunError {
    pub kind: &'static str,
    pub source: EngineError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    /// CSV artifacts, then the config echo; the report itself is not listed.
    pub artifacts: Vec<Artifact>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs the experiment in memory.
pub fn execute(cfg: &ResolvedConfig) -> Result<RunOutput, RunError> {
    let kind = cfg.kind.name();
    let outcome = experiments::run(cfg).map_err(|source| RunError { kind, source })?;
    let echo = cfg.echo();
    let mut artifacts = outcome.artifacts;
    artifacts.push(Artifact { name: format!("{kind}.config.toml"), bytes: echo.clone().into_bytes() });
    let provenance =
        Provenance { config_sha256: sha256_hex(echo.as_bytes()), version: env!("CARGO_PKG_VERSION").to_string() };
    let names = artifacts.iter().map(|a| a.name.clone()).collect();
    let report = Report::new(kind, cfg.seed, outcome.rows, names, outcome.notes, provenance);
    Ok(RunOutput { report, artifacts })
}

/// Writes every artifact and `<kind>.report.json` into `dir`.
pub fn write_outputs(dir: &Path, out: &RunOutput) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for a in &out.artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.bytes)?;
        written.push(path);
    }
    let path = dir.join(format!("{}.report.json", out.report.kind));
    std::fs::write(&path, out.report.to_json())?;
    written.push(path);
    Ok(written)
}

/// `--out`, then the config's `output_dir`, then the environment, then
/// `histories-out`.
pub fn output_dir(flag: Option<&Path>, cfg: &ResolvedConfig, env: Option<&str>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, rayon::ThreadPoolBuildError> {
    match threads {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}
