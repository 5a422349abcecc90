//! Experiment configuration: flat `key = value` text under an
//! `[experiment]` header.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sdm_core::{Error, KvDoc, KvMap, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Determinants,
    NodeCount,
    Moments,
    Dos,
    DbmCurrent,
    DbmDensity,
    Barrier,
    Passage,
    RateFunction,
    D1Chain,
    Gle,
    ValidateAll,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 12] = [
        ExperimentKind::Determinants,
        ExperimentKind::NodeCount,
        ExperimentKind::Moments,
        ExperimentKind::Dos,
        ExperimentKind::DbmCurrent,
        ExperimentKind::DbmDensity,
        ExperimentKind::Barrier,
        ExperimentKind::Passage,
        ExperimentKind::RateFunction,
        ExperimentKind::D1Chain,
        ExperimentKind::Gle,
        ExperimentKind::ValidateAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Determinants => "determinants",
            ExperimentKind::NodeCount => "node-count",
            ExperimentKind::Moments => "moments",
            ExperimentKind::Dos => "dos",
            ExperimentKind::DbmCurrent => "dbm-current",
            ExperimentKind::DbmDensity => "dbm-density",
            ExperimentKind::Barrier => "barrier",
            ExperimentKind::Passage => "passage",
            ExperimentKind::RateFunction => "rate-function",
            ExperimentKind::D1Chain => "d1-chain",
            ExperimentKind::Gle => "gle",
            ExperimentKind::ValidateAll => "validate-all",
        }
    }

    /// Keys accepted besides the common ones.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Determinants => &["instances", "n_max", "l_max", "tol"],
            ExperimentKind::NodeCount => &["instances", "energies", "n_max", "l_max"],
            ExperimentKind::Moments => &["j", "mu", "c", "n", "q", "samples", "sampler", "tol_se", "tol_rel", "tol_abs"],
            ExperimentKind::Dos => &[
                "tilde_j", "length", "a", "n", "realizations", "lo", "hi", "bins", "coarse_bins", "edge_fit_lo",
                "edge_fit_hi", "tol_l1", "tol_edge_rel",
            ],
            ExperimentKind::DbmCurrent => {
                &["n", "tilde_j", "e_offsets", "confined_offset", "total_time", "dt", "tol_rel", "max_confined_crossings"]
            }
            ExperimentKind::DbmDensity => &[
                "n", "mean_n", "tilde_j", "e_offset", "total_time", "dt", "bins", "tol_l1", "tol_se", "critical_n", "critical_time",
                "critical_burn_in", "critical_lo", "critical_hi", "critical_bins", "fit_lo", "fit_hi", "tol_exponent",
            ],
            ExperimentKind::Barrier => &[
                "tilde_j", "points", "span", "tol", "near_lo", "near_hi", "deep_lo", "deep_hi", "tol_exponent",
            ],
            ExperimentKind::Passage => &["tilde_j", "e_offset", "n", "trials", "max_time", "dt", "tol_rel"],
            ExperimentKind::RateFunction => &["j", "mu", "points", "e_lo", "e_hi", "q_lo", "q_hi", "tol"],
            ExperimentKind::D1Chain => &["j", "q", "mu", "tol"],
            ExperimentKind::Gle => &["tilde_j", "e", "c", "n", "a", "lengths", "samples", "q", "tol_abs"],
            ExperimentKind::ValidateAll => &["configs"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

const COMMON_KEYS: [&str; 6] = ["kind", "name", "seed", "out", "workers", "max_seconds"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub name: String,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Wall-clock budget checked by the acceptance suite.
    pub max_seconds: Option<f64>,
    /// Directory of the config file, for resolving relative paths.
    pub base_dir: PathBuf,
    values: KvMap,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let doc = KvDoc::parse(text)?;
        if let Some(stray) = doc.sections.keys().find(|s| s.as_str() != "experiment" && !doc.sections[*s].is_empty()) {
            return Err(Error::Config(format!("unexpected section `[{stray}]`; use a single [experiment] section")));
        }
        let values = doc.section("experiment").cloned().ok_or_else(|| Error::Config("missing [experiment] section".into()))?;
        let kind: ExperimentKind = values.get("kind").ok_or_else(|| Error::Config("missing `kind`".into()))?.parse()?;
        let allowed: Vec<&str> = COMMON_KEYS.iter().chain(kind.keys()).copied().collect();
        values.check_keys(&allowed)?;
        let cfg = ExperimentConfig {
            kind,
            name: values.get("name").unwrap_or(kind.name()).to_string(),
            seed: values.get_parsed("seed")?.unwrap_or(1),
            out_dir: values.get("out").map(PathBuf::from),
            max_seconds: values.get_parsed("max_seconds")?,
            base_dir: PathBuf::from("."),
            values,
        };
        cfg.check_lists()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::parse(&text).map_err(|e| annotate(e, &path.display().to_string()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Every list-valued key that is present must be nonempty.
    fn check_lists(&self) -> Result<()> {
        for key in ["n", "mean_n", "q", "mu", "e_offsets", "lengths", "configs", "j"] {
            if let Some(raw) = self.values.get(key) {
                if raw.split(',').all(|s| s.trim().is_empty()) {
                    return Err(Error::Config(format!("`{key}` must be a nonempty list")));
                }
            }
        }
        Ok(())
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.values.get_parsed(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.values.get_parsed(key)?.ok_or_else(|| Error::Config(format!("{}: missing `{key}`", self.name)))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let v: Vec<T> = self.values.get_list(key)?.ok_or_else(|| Error::Config(format!("{}: missing `{key}`", self.name)))?;
        if v.is_empty() {
            return Err(Error::Config(format!("`{key}` must be a nonempty list")));
        }
        Ok(v)
    }

    pub fn list_or<T: FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        match self.values.get(key) {
            None => Ok(default),
            Some(_) => self.list(key),
        }
    }

    pub fn raw(&self) -> &KvMap {
        &self.values
    }

    /// Overrides one key, re-checking it against the kind.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let allowed: Vec<&str> = COMMON_KEYS.iter().chain(self.kind.keys()).copied().collect();
        if !allowed.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key, value);
        match key {
            "seed" => self.seed = self.require("seed")?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            _ => {}
        }
        self.check_lists()
    }
}

pub fn annotate(e: Error, context: &str) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{context}: {m}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_checks_keys() {
        let cfg = ExperimentConfig::parse("[experiment]\nkind = moments\nq = 0, 0.5, 1\nmu = 0.5\nseed = 9\n").unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Moments);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.list::<f64>("q").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.get("samples", 7usize).unwrap(), 7);
        assert!(ExperimentConfig::parse("[experiment]\nkind = moments\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::parse("kind = moments\n").is_err());
        assert!(ExperimentConfig::parse("[experiment]\nkind = nothing\n").is_err());
        assert!(ExperimentConfig::parse("[experiment]\nkind = moments\n[other]\nx = 1\n").is_err());
    }

    #[test]
    fn empty_list_is_a_config_error() {
        let e = ExperimentConfig::parse("[experiment]\nkind = moments\nq = \n").unwrap_err();
        assert!(matches!(e, Error::Config(_)));
        let e = ExperimentConfig::parse("[experiment]\nkind = moments\nq = , ,\n").unwrap_err();
        assert!(matches!(e, Error::Config(_)));
    }

    #[test]
    fn kinds_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
    }
}
