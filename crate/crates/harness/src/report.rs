//! Comparison reports: one row per checked quantity, written as CSV with a
//! JSON sidecar.

use std::fmt;
use std::path::{Path, PathBuf};

use sdm_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentKind;

pub const SCHEMA_VERSION: &str = "sdm-report/1";

/// How a row's value is compared with its reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// `|value − reference| ≤ tolerance`.
    Within,
    /// `value < reference`.
    Below,
    /// `value > reference`.
    Above,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Within => "within",
            Check::Below => "below",
            Check::Above => "above",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    /// Sweep point as `key=value` pairs separated by `;`.
    pub inputs: String,
    pub reference: f64,
    pub value: f64,
    /// Statistical error of `value`, `NaN` for deterministic quantities.
    pub stderr: f64,
    pub check: Check,
    pub tolerance: f64,
    pub passed: bool,
}

impl ComparisonRow {
    /// `[ok] label (inputs): value ref reference ± tolerance`.
    pub fn summary_line(&self) -> String {
        let bound = match self.check {
            Check::Within => format!(" ref {} ± {}", fmt_num(self.reference), fmt_num(self.tolerance)),
            Check::Below => format!(" < {}", fmt_num(self.reference)),
            Check::Above => format!(" > {}", fmt_num(self.reference)),
        };
        let se = if self.stderr.is_nan() { String::new() } else { format!(" (se {})", fmt_num(self.stderr)) };
        format!("[{}] {} ({}): {}{se}{bound}", if self.passed { "ok" } else { "FAIL" }, self.label, self.inputs, fmt_num(self.value))
    }

    pub fn within(label: impl Into<String>, inputs: impl Into<String>, reference: f64, value: f64, stderr: f64, tolerance: f64) -> Self {
        let passed = (value - reference).abs() <= tolerance;
        ComparisonRow { label: label.into(), inputs: inputs.into(), reference, value, stderr, check: Check::Within, tolerance, passed }
    }

    pub fn below(label: impl Into<String>, inputs: impl Into<String>, bound: f64, value: f64, stderr: f64) -> Self {
        let passed = value < bound;
        ComparisonRow { label: label.into(), inputs: inputs.into(), reference: bound, value, stderr, check: Check::Below, tolerance: 0.0, passed }
    }

    pub fn above(label: impl Into<String>, inputs: impl Into<String>, bound: f64, value: f64, stderr: f64) -> Self {
        let passed = value > bound;
        ComparisonRow { label: label.into(), inputs: inputs.into(), reference: bound, value, stderr, check: Check::Above, tolerance: 0.0, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub build: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Provenance {
    pub fn now(seed: u64) -> Self {
        let timestamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Provenance { seed, build: format!("sdm-harness {}", env!("CARGO_PKG_VERSION")), timestamp }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: String,
    pub experiment: String,
    pub kind: ExperimentKind,
    pub rows: Vec<ComparisonRow>,
    pub passed: bool,
    pub runtime_seconds: f64,
    pub provenance: Provenance,
}

impl ComparisonReport {
    pub fn new(experiment: &str, kind: ExperimentKind, rows: Vec<ComparisonRow>, seed: u64, runtime_seconds: f64) -> Self {
        let passed = rows.iter().all(|r| r.passed);
        ComparisonReport {
            schema: SCHEMA_VERSION.into(),
            experiment: experiment.into(),
            kind,
            rows,
            passed,
            runtime_seconds,
            provenance: Provenance::now(seed),
        }
    }

    /// Rows as CSV. Holds no timing or provenance, so identical configs
    /// give identical bytes.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(["experiment", "label", "inputs", "reference", "value", "stderr", "check", "tolerance", "passed"])
            .map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                self.experiment.clone(),
                r.label.clone(),
                r.inputs.clone(),
                fmt_num(r.reference),
                fmt_num(r.value),
                fmt_num(r.stderr),
                r.check.to_string(),
                fmt_num(r.tolerance),
                r.passed.to_string(),
            ])
            .map_err(csv_err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// Writes `<experiment>.csv` and `<experiment>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.experiment));
        let json_path = dir.join(format!("{}.json", self.experiment));
        std::fs::write(&csv_path, self.to_csv()?)?;
        std::fs::write(&json_path, self.to_json()?)?;
        Ok((csv_path, json_path))
    }

    /// One indented line per row.
    pub fn summary(&self) -> String {
        self.rows.iter().map(|r| format!("  {}\n", r.summary_line())).collect()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Shortest round-trip representation, `NaN` spelled out.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_is_fail_iff_a_row_fails() {
        let ok = ComparisonRow::within("a", "q=1", 1.0, 1.05, f64::NAN, 0.1);
        let bad = ComparisonRow::below("b", "", 0.05, 0.07, f64::NAN);
        assert!(ok.passed && !bad.passed);
        assert!(ComparisonReport::new("x", ExperimentKind::Moments, vec![ok.clone()], 1, 0.0).passed);
        assert!(!ComparisonReport::new("x", ExperimentKind::Moments, vec![ok, bad], 1, 0.0).passed);
        assert!(ComparisonRow::above("c", "", 0.0, 1.0, 0.1).passed);
    }

    #[test]
    fn csv_has_named_columns_and_no_timing() {
        let r = ComparisonReport::new("x", ExperimentKind::Moments, vec![ComparisonRow::within("a", "q=1", 1.0, 1.0, 0.1, 0.1)], 1, 3.0);
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "experiment,label,inputs,reference,value,stderr,check,tolerance,passed");
        assert_eq!(lines.next().unwrap(), "x,a,q=1,1,1,0.1,within,0.1,true");
        let mut later = r.clone();
        later.runtime_seconds = 99.0;
        later.provenance.timestamp += 5;
        assert_eq!(later.to_csv().unwrap(), csv);
    }
}
