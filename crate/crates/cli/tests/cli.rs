use histories_cli::config::{self, ExperimentKind};
use histories_cli::criteria;
use std::path::Path;
use std::process::{Command, Output};

fn histories(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_histories"));
    cmd.args(args).env_remove("HISTORIES_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("HISTORIES_OUT_DIR", dir);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_PEAKING: &str = "kind = \"peaking_vs_N\"\nseed = 11\n[params]\nparticle_numbers = [4, 8, 16, 32]\nsamples = 2000\n";

#[test]
fn list_names_every_kind() {
    let out = histories(&["list"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in ExperimentKind::ALL {
        assert!(text.contains(kind.name()), "{}", kind.name());
    }
    let json = histories(&["list", "--json"], None);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 6);
    assert!(entries.iter().all(|e| e["params"].is_object() && e["relation"].is_string()));
}

#[test]
fn unknown_kind_exits_2_without_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", "kind = \"warp_drive\"\n");
    let out_dir = tmp.path().join("out");
    let out = histories(&["run", &cfg, "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kind"));
    assert!(!out_dir.exists());
}

#[test]
fn schema_errors_name_the_key_path() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", "kind = \"diffusion_emergence\"\n[params]\ngama = 1.0\n");
    let out = histories(&["validate", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gama"));
    let cfg = write(tmp.path(), "noseed.toml", "kind = \"peaking_vs_N\"\n");
    assert_eq!(histories(&["validate", &cfg], None).status.code(), Some(2));
    assert!(histories(&["validate", &cfg, "--seed", "4"], None).status.success());
}

#[test]
fn validate_echo_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    for kind in ExperimentKind::ALL {
        let cfg = write(tmp.path(), "c.toml", &format!("kind = \"{}\"\nseed = 5\n", kind.name()));
        let first = histories(&["validate", &cfg], None);
        assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
        let echo = write(tmp.path(), "echo.toml", std::str::from_utf8(&first.stdout).unwrap());
        let second = histories(&["validate", &echo], None);
        assert_eq!(first.stdout, second.stdout);
    }
}

#[test]
fn reruns_and_thread_counts_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "p.toml", SMALL_PEAKING);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let dir = tmp.path().join(format!("run{i}"));
        let out = histories(&["run", &cfg, "--out", dir.to_str().unwrap(), "--threads", threads], None);
        assert!(out.status.code().is_some_and(|c| c <= 1));
        outputs.push((
            std::fs::read(dir.join("peaking_vs_N.csv")).unwrap(),
            std::fs::read(dir.join("peaking_vs_N.report.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn seed_flag_changes_the_samples() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "p.toml", SMALL_PEAKING);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    histories(&["run", &cfg, "--out", a.to_str().unwrap()], None);
    histories(&["run", &cfg, "--out", b.to_str().unwrap(), "--seed", "12"], None);
    assert_ne!(std::fs::read(a.join("peaking_vs_N.csv")).unwrap(), std::fs::read(b.join("peaking_vs_N.csv")).unwrap());
    let echo = std::fs::read_to_string(b.join("peaking_vs_N.config.toml")).unwrap();
    assert!(echo.contains("seed = 12"));
}

#[test]
fn environment_sets_the_default_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "g.toml", "kind = \"gaussian_k_scan\"\n");
    let env_dir = tmp.path().join("from_env");
    let out = histories(&["run", &cfg], Some(&env_dir));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(env_dir.join("gaussian_k_scan.csv").exists());
    let flag_dir = tmp.path().join("from_flag");
    histories(&["run", &cfg, "--out", flag_dir.to_str().unwrap()], Some(&env_dir));
    assert!(flag_dir.join("gaussian_k_scan.report.json").exists());
}

#[test]
fn failing_criterion_exits_1_and_still_writes_the_report() {
    // a constant kernel in 3-D bends the log-log slope away from -1 at these volumes
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "v.toml", "kind = \"variance_scaling\"\n[params]\ndim = 3\n");
    let dir = tmp.path().join("out");
    let out = histories(&["run", &cfg, "--out", dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("variance_scaling.report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    let rows = report["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["pass"] == false));
    assert_eq!(report["pass"].as_bool().unwrap(), rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn report_tolerances_come_from_the_criteria() {
    let allowed: &[(u8, &[f64])] = &[
        (1, &[criteria::EXACT_DECOHERENCE]),
        (3, &[criteria::PROBABILITY_TOTAL, criteria::COARSE_GRAIN_SLACK]),
        (4, &[criteria::PEAKING_SLOPE]),
        (5, &[criteria::VOLUME_SLOPE, criteria::UNCORRELATED_RATIO, criteria::PREFACTOR_RELATIVE]),
        (6, &[0.0]),
        (7, &[criteria::SMALL_K_SLOPE, criteria::SMALL_K_RATIO]),
        (8, &[criteria::DIFFUSION_CONSTANT_RELATIVE, criteria::DIFFUSION_RESIDUAL, 0.0]),
    ];
    for kind in ExperimentKind::ALL {
        if kind == ExperimentKind::PeakingVsN {
            continue;
        }
        let text = format!("kind = \"{}\"\nseed = 3\n", kind.name());
        let cfg = config::resolve(&config::parse_str(&text).unwrap(), None).unwrap();
        let out = histories_cli::execute(&cfg).unwrap();
        assert!(out.report.pass, "{:?}", out.report.rows);
        for row in &out.report.rows {
            let tols = allowed.iter().find(|(c, _)| *c == row.criterion).unwrap().1;
            assert!(tols.contains(&row.tolerance), "{}: {}", row.name, row.tolerance);
        }
    }
}
