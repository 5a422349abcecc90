//! Parameter records for the discrete and continuum operator ensembles.
//!
//! The discrete operator acts on `N`-component fields over a hypercubic
//! lattice of `L^d` sites:
//!
//! ```text
//! H_{ix,jy} = δ_ij (μ − tΔ)_xy + W_ij(x) δ_xy,    W(x) = J (H(x) + ξ(x) I)
//! ```
//!
//! with `H(x)` independent GOE(N) blocks and `ξ(x)` scalar Gaussians of
//! variance `c/N`. Spectral quantities depend on `μ` and `E` only through
//! `μ − E`, see [`ModelParams::canonicalize`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kv::KvMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Dirichlet,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => write!(f, "periodic"),
            Boundary::Dirichlet => write!(f, "dirichlet"),
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" | "p" => Ok(Boundary::Periodic),
            "dirichlet" | "d" => Ok(Boundary::Dirichlet),
            other => Err(Error::Config(format!("unknown boundary `{other}`"))),
        }
    }
}

/// Full parameterization of the discrete operator ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Internal dimension (0 means a single site).
    pub d: usize,
    /// Matrix block size.
    pub n: usize,
    /// Linear lattice size; the lattice has `l^d` sites.
    pub l: usize,
    /// Elastic coefficient in front of the lattice Laplacian.
    pub t: f64,
    /// Disorder strength.
    pub j: f64,
    /// Trace-noise coefficient of the disorder correlator.
    pub c: f64,
    /// Curvature (mass).
    pub mu: f64,
    /// Spectral parameter.
    pub e: f64,
    pub boundary: Boundary,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            d: 1,
            n: 8,
            l: 16,
            t: 1.0,
            j: 1.0,
            c: 1.0,
            mu: 1.0,
            e: 0.0,
            boundary: Boundary::Periodic,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be ≥ 1".into()));
        }
        if self.l == 0 {
            return Err(Error::InvalidParams("l must be ≥ 1".into()));
        }
        if !(self.t > 0.0) {
            return Err(Error::InvalidParams("t must be > 0".into()));
        }
        if !(self.j > 0.0) {
            return Err(Error::InvalidParams("j must be > 0".into()));
        }
        if !(self.c >= 0.0) {
            return Err(Error::InvalidParams("c must be ≥ 0".into()));
        }
        if !self.mu.is_finite() || !self.e.is_finite() {
            return Err(Error::InvalidParams("mu and e must be finite".into()));
        }
        Ok(())
    }

    /// Number of lattice sites `M = L^d`.
    pub fn sites(&self) -> usize {
        self.l.pow(self.d as u32)
    }

    /// Total matrix dimension `N·M`.
    pub fn dim(&self) -> usize {
        self.n * self.sites()
    }

    /// Effective mass `μ − E`, the only combination spectral quantities see.
    pub fn mass(&self) -> f64 {
        self.mu - self.e
    }

    /// Maps `(μ, E)` to `(μ − E, 0)`.
    pub fn canonicalize(&self) -> ModelParams {
        ModelParams { mu: self.mu - self.e, e: 0.0, ..*self }
    }

    pub fn with_mass(&self, mu: f64) -> ModelParams {
        ModelParams { mu, e: 0.0, ..*self }
    }

    /// Reads the keys `d, n, l, t, j, c, mu, e, boundary` on top of defaults.
    pub fn from_kv(kv: &KvMap) -> Result<ModelParams> {
        let mut p = ModelParams::default();
        if let Some(v) = kv.get_parsed::<usize>("d")? {
            p.d = v;
        }
        if let Some(v) = kv.get_parsed::<usize>("n")? {
            p.n = v;
        }
        if let Some(v) = kv.get_parsed::<usize>("l")? {
            p.l = v;
        }
        if let Some(v) = kv.get_parsed::<f64>("t")? {
            p.t = v;
        }
        if let Some(v) = kv.get_parsed::<f64>("j")? {
            p.j = v;
        }
        if let Some(v) = kv.get_parsed::<f64>("c")? {
            p.c = v;
        }
        if let Some(v) = kv.get_parsed::<f64>("mu")? {
            p.mu = v;
        }
        if let Some(v) = kv.get_parsed::<f64>("e")? {
            p.e = v;
        }
        if let Some(v) = kv.get_parsed::<Boundary>("boundary")? {
            p.boundary = v;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn to_kv(&self) -> String {
        format!(
            "d = {}\nn = {}\nl = {}\nt = {}\nj = {}\nc = {}\nmu = {}\ne = {}\nboundary = {}\n",
            self.d, self.n, self.l, self.t, self.j, self.c, self.mu, self.e, self.boundary
        )
    }
}

/// Continuum `d = 1` operator `−t̃ ∂²_τ + μ̃ + W̃(τ)` on `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumParams {
    pub tilde_t: f64,
    pub tilde_j: f64,
    pub c: f64,
    pub mu: f64,
    pub e: f64,
    pub length: f64,
}

impl Default for ContinuumParams {
    fn default() -> Self {
        ContinuumParams { tilde_t: 1.0, tilde_j: 1.0, c: 0.0, mu: 0.0, e: 0.0, length: 10.0 }
    }
}

impl ContinuumParams {
    /// `β = 2 J̃²`, the noise parameter of the associated eigenvalue diffusion.
    pub fn beta(&self) -> f64 {
        2.0 * self.tilde_j * self.tilde_j
    }

    /// Lattice discretization with spacing `a`: `t = t̃/a²`, `J² = J̃²/a`,
    /// `L = length/a`. Returns the mapped parameters and whether
    /// `length/a` had to be rounded.
    pub fn to_lattice(&self, a: f64, n: usize) -> Result<(ModelParams, bool)> {
        if !(a > 0.0) {
            return Err(Error::InvalidParams("lattice spacing must be > 0".into()));
        }
        let sites = self.length / a;
        let l = sites.round().max(1.0);
        let rounded = (sites - l).abs() > 1e-9 * sites.max(1.0);
        if rounded {
            log::warn!("length/a = {sites} is not integral; using {l} sites");
        }
        let p = ModelParams {
            d: 1,
            n,
            l: l as usize,
            t: self.tilde_t / (a * a),
            j: (self.tilde_j * self.tilde_j / a).sqrt(),
            c: self.c,
            mu: self.mu,
            e: self.e,
            boundary: Boundary::Periodic,
        };
        p.validate()?;
        Ok((p, rounded))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_shifts_mass() {
        let p = ModelParams { mu: 2.0, e: 0.5, ..Default::default() };
        let c = p.canonicalize();
        assert_eq!(c.mu, 1.5);
        assert_eq!(c.e, 0.0);
        let q = ModelParams { mu: 1.0, e: 0.0, ..Default::default() };
        assert_eq!(q.canonicalize(), q);
    }

    #[test]
    fn lattice_mapping_scaling() {
        let cont = ContinuumParams { tilde_t: 1.0, tilde_j: 1.5, length: 10.0, ..Default::default() };
        let (p1, _) = cont.to_lattice(1.0, 4).unwrap();
        assert_eq!(p1.t, 1.0);
        assert!((p1.j - 1.5).abs() < 1e-15);
        let (pa, _) = cont.to_lattice(0.2, 4).unwrap();
        let (pb, _) = cont.to_lattice(0.1, 4).unwrap();
        assert!((pb.t / pa.t - 4.0).abs() < 1e-12);
        assert!((pb.j * pb.j / (pa.j * pa.j) - 2.0).abs() < 1e-12);
        assert_eq!(pb.l, 100);
        let (_, rounded) = cont.to_lattice(0.3, 4).unwrap();
        assert!(rounded);
    }

    #[test]
    fn rejects_bad_params() {
        let p = ModelParams { j: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = ModelParams { n: 0, ..Default::default() };
        assert!(p.validate().is_err());
    }
}
