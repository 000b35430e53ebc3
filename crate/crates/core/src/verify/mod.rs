//! End-to-end verification pipelines and their reports.
//!
//! Each pipeline builds (or looks up) a spectrum, evaluates the relevant
//! inequalities at every `k`, and returns a [`VerificationReport`] whose
//! `pass` flag is the conjunction of its rows.

mod commands;
mod plot;
mod spec;

pub use commands::{
    certify, heisenberg_verify, immersibility, mesh_verify, sphere_verify, CertifyOptions,
    HeisenbergOptions, MeshOptions, SphereOptions, DEFAULT_DISCRETIZATION_TOLERANCE,
};
pub use plot::slack_svg;
pub use spec::{AmbientSpec, MeshSource, PotentialSpec};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundResult, InequalityCheck};
use crate::{Error, Result};

/// Bumped whenever a field of the JSON report changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping the worker threads used for parallel work.
pub const THREADS_ENV: &str = "SPECTRAL_BOUNDS_THREADS";

/// One evaluated inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub k: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub satisfied: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRow {
    pub fn from_check(name: &str, check: &InequalityCheck) -> Self {
        Self {
            name: name.to_string(),
            k: check.k as u64,
            lhs: check.lhs,
            rhs: check.rhs,
            slack: check.slack,
            tolerance: check.tolerance,
            satisfied: check.satisfied,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// A two-sided bound on `λ_{k+1}` and the value it was compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub name: String,
    pub k: u64,
    pub lower: f64,
    pub upper: f64,
    pub discriminant: f64,
    pub feasible: bool,
    pub value: Option<f64>,
}

impl BoundRow {
    pub fn from_bound(name: &str, k: usize, bound: &BoundResult, value: Option<f64>) -> Self {
        Self {
            name: name.to_string(),
            k: k as u64,
            lower: bound.lower,
            upper: bound.upper,
            discriminant: bound.discriminant,
            feasible: bound.feasible,
            value,
        }
    }
}

/// Eigensolver and discretization metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub unknowns: usize,
    pub vertices: usize,
    pub boundary_size: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: usize,
    pub max_residual: f64,
    pub mass_orthonormality_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    /// Human-readable description of the tolerance policy.
    pub tolerance: String,
    pub checks: Vec<CheckRow>,
    pub bounds: Vec<BoundRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSummary>,
    /// Scalar outputs (curvature extrema, floors, …).
    pub values: BTreeMap<String, f64>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(command: &str, seed: u64, tolerance: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed,
            tolerance: tolerance.into(),
            checks: Vec::new(),
            bounds: Vec::new(),
            solver: None,
            values: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
    }

    pub fn push(&mut self, row: CheckRow) {
        self.checks.push(row);
    }

    /// Recomputes `pass` from the rows.
    pub fn finalize(mut self) -> Self {
        self.pass = self.checks.iter().all(|c| c.satisfied);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| !c.satisfied)
    }

    /// Rows with the given check name.
    pub fn rows<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One CSV record per check row and per bound row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.checks {
            w.serialize(FlatRow {
                kind: "check",
                name: &c.name,
                k: c.k,
                lhs: Some(c.lhs),
                rhs: Some(c.rhs),
                slack: Some(c.slack),
                tolerance: Some(c.tolerance),
                satisfied: Some(c.satisfied),
                lower: None,
                upper: None,
                discriminant: None,
                feasible: None,
                value: None,
                detail: c.detail.as_deref(),
            })?;
        }
        for b in &self.bounds {
            w.serialize(FlatRow {
                kind: "bound",
                name: &b.name,
                k: b.k,
                lhs: None,
                rhs: None,
                slack: None,
                tolerance: None,
                satisfied: None,
                lower: Some(b.lower),
                upper: Some(b.upper),
                discriminant: Some(b.discriminant),
                feasible: Some(b.feasible),
                value: b.value,
                detail: None,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
        let path = path.as_ref();
        let text = self.render(format)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

#[derive(Serialize)]
struct FlatRow<'a> {
    kind: &'a str,
    name: &'a str,
    k: u64,
    lhs: Option<f64>,
    rhs: Option<f64>,
    slack: Option<f64>,
    tolerance: Option<f64>,
    satisfied: Option<bool>,
    lower: Option<f64>,
    upper: Option<f64>,
    discriminant: Option<f64>,
    feasible: Option<bool>,
    value: Option<f64>,
    detail: Option<&'a str>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Reads the thread cap from [`THREADS_ENV`] and configures the global
/// worker pool. Returns the cap that was applied, if any.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // Fails only if the pool was already initialized, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(Some(threads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Tolerance;

    #[test]
    fn csv_rows_match_json_rows() {
        let mut r = VerificationReport::new("demo", 42, "relative 5%");
        r.push(CheckRow::from_check("yang", &InequalityCheck::new(1, 1.0, 2.0, Tolerance::Relative(0.05))));
        r.push(CheckRow::from_check("yang", &InequalityCheck::new(2, 3.0, 2.0, Tolerance::Relative(0.05))).with_detail("a,b"));
        r.bounds.push(BoundRow::from_bound("quadratic", 1, &crate::bounds::BoundResult::from_center(4.0, 4.0), Some(5.0)));
        let r = r.finalize();
        assert!(!r.pass);
        let csv = r.to_csv().unwrap();
        let mut reader = csv::Reader::from_reader(csv.as_bytes());
        let records: Vec<csv::StringRecord> = reader.records().map(|x| x.unwrap()).collect();
        assert_eq!(records.len(), r.checks.len() + r.bounds.len());
        assert_eq!(&records[1][13], "a,b");
        let json: VerificationReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(json, r);
    }
}
