use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    /// Acceptance criterion the row belongs to.
    pub criterion: u8,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// Tolerance applies to `|measured - expected| / |expected|`.
    pub relative: bool,
    pub pass: bool,
}

impl Row {
    pub fn absolute(name: impl Into<String>, criterion: u8, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        Self { name: name.into(), criterion, measured, expected, tolerance, relative: false, pass }
    }

    pub fn relative(name: impl Into<String>, criterion: u8, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = ((measured - expected) / expected).abs() <= tolerance;
        Self { name: name.into(), criterion, measured, expected, tolerance, relative: true, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the resolved config echo.
    pub config_sha256: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub seed: Option<u64>,
    pub rows: Vec<Row>,
    pub pass: bool,
    pub artifacts: Vec<String>,
    /// Conditions worth knowing that do not fail a row.
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(kind: &str, seed: Option<u64>, rows: Vec<Row>, artifacts: Vec<String>, notes: Vec<String>, provenance: Provenance) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Self { kind: kind.into(), seed, rows, pass, artifacts, notes, provenance }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
