//! Plot-ready CSV curves. Nothing is rendered here.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use sdm_analytic::cubic::beta_of;
use sdm_analytic::dos::DosEvaluator;
use sdm_analytic::Model;
use sdm_core::{Error, Result};

use crate::report::fmt_num;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// `ρ_K(α)` of the `d = 1` continuum.
    Dos,
    /// `Σ_q` against `q`.
    SigmaQ,
    /// `Φ(𝖾)` against `𝖾`.
    Rate,
    /// Barrier `U(E)` below the edge.
    Barrier,
    /// Resolvent constant `𝒥(E)`.
    Jconst,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Dos => "dos",
            CurveKind::SigmaQ => "sigma-q",
            CurveKind::Rate => "rate",
            CurveKind::Barrier => "barrier",
            CurveKind::Jconst => "jconst",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            CurveKind::Dos => &["alpha", "rho"],
            CurveKind::SigmaQ => &["q", "sigma"],
            CurveKind::Rate => &["e", "phi"],
            CurveKind::Barrier => &["E", "U"],
            CurveKind::Jconst => &["E", "reJ", "imJ"],
        }
    }
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [CurveKind::Dos, CurveKind::SigmaQ, CurveKind::Rate, CurveKind::Barrier, CurveKind::Jconst]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown curve `{s}` (dos, sigma-q, rate, barrier, jconst)")))
    }
}

/// Model and grid for a curve. `j` is `J̃` for the continuum curves
/// (`dos`, `barrier`, `jconst`) and `J` for `sigma-q` and `rate`.
#[derive(Clone)]
pub struct CurveSpec<'a> {
    pub model: Model,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Evaluator for `dos`.
    pub dos: &'a dyn DosEvaluator,
}

impl CurveSpec<'_> {
    fn grid(&self) -> Vec<f64> {
        let n = self.points.max(2);
        (0..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64).collect()
    }
}

/// Curve rows; points where the quantity is undefined (out of phase or
/// range) are skipped.
pub fn curve_rows(kind: CurveKind, spec: &CurveSpec) -> Vec<Vec<f64>> {
    let m = &spec.model;
    let beta = beta_of(m.j);
    spec.grid()
        .into_iter()
        .filter_map(|x| match kind {
            CurveKind::Dos => Some(vec![x, spec.dos.density(x, m.j)]),
            CurveKind::SigmaQ => sdm_analytic::sigma_q(x, m).ok().map(|s| vec![x, s]),
            CurveKind::Rate => sdm_analytic::rate_function(x, m).ok().map(|r| vec![x, r.phi]),
            CurveKind::Barrier => sdm_analytic::barrier_height(x, beta).ok().map(|u| vec![x, u]),
            CurveKind::Jconst => {
                let v = sdm_analytic::resolvent_constant(x, beta).value;
                Some(vec![x, v.re, v.im])
            }
        })
        .collect()
}

/// Writes `<kind>.csv` into `dir` and returns its path.
pub fn emit_curves(kind: CurveKind, spec: &CurveSpec, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.csv", kind.name()));
    let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(kind.header()).map_err(|e| Error::Io(e.to_string()))?;
    for row in curve_rows(kind, spec) {
        w.write_record(row.iter().map(|&v| fmt_num(v))).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_headers_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let reg = sdm_analytic::dos_registry();
        let spec = CurveSpec { model: Model::zero_dim(0.5, 1.0), lo: -0.5, hi: 1.5, points: 11, dos: reg.get("wr").unwrap() };
        let path = emit_curves(CurveKind::SigmaQ, &spec, dir.path()).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "q,sigma");
        assert_eq!(lines.len(), 12);
        let spec = CurveSpec { model: Model::continuum(0.0, 1.0), lo: -4.0, hi: 1.0, ..spec };
        let path = emit_curves(CurveKind::Jconst, &spec, dir.path()).unwrap();
        assert!(std::fs::read_to_string(path).unwrap().starts_with("E,reJ,imJ\n"));
        // Barrier exists only below the edge.
        assert!(curve_rows(CurveKind::Barrier, &spec).iter().all(|r| r[0] < sdm_analytic::spectral_edge(1.0)));
    }
}
