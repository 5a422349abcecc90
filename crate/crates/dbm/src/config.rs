use sdm_analytic::cubic::{beta_of, spectral_edge};
use sdm_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// How the pair repulsion `Σ_{j≠i} 1/(λ_i − λ_j)` is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Interaction {
    /// Row by row, `N(N − 1)` divisions.
    #[default]
    Direct,
    /// Each pair evaluated once and added with opposite signs. The
    /// accumulation order per particle matches `Direct`, so both give
    /// bit-identical forces.
    Pairwise,
}

/// Initial configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Start {
    /// Particles spread evenly over `(0, Λ_cut]`, standing in for
    /// `λ_i(0) = +∞`. Starting all of them at the cutoff would let the free
    /// flow `λ ≈ 1/τ` squeeze them onto one point.
    #[default]
    Infinity,
    /// Quantiles of the analytic confined droplet (needs `E < E*`).
    Droplet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbmConfig {
    pub n: usize,
    pub e: f64,
    /// Noise scale; `β = 2J̃²`.
    pub tilde_j: f64,
    /// Zero-mode noise strength.
    pub c: f64,
    pub dt: f64,
    /// Measured time after burn-in, cut down to a whole number of batches.
    pub total_time: f64,
    pub cutoff: f64,
    pub burn_in: f64,
    /// Number of batches for batch-means errors.
    pub batches: usize,
    /// Base steps between histogram samples.
    pub sample_every: usize,
    pub histogram: HistogramSpec,
    pub interaction: Interaction,
    pub start: Start,
    /// End the run at the first crossing (first-passage mode).
    pub stop_at_first_crossing: bool,
}

impl DbmConfig {
    /// Defaults: `dt = 1e−3`, `T = 10³`, `Λ_cut = 50·max(1, √|E|)` and a
    /// burn-in of `max(20, 5/|E* − E|)`.
    pub fn new(n: usize, e: f64, tilde_j: f64) -> Self {
        DbmConfig {
            n,
            e,
            tilde_j,
            c: 0.0,
            dt: 1e-3,
            total_time: 1e3,
            cutoff: default_cutoff(e),
            burn_in: default_burn_in(e, tilde_j),
            batches: 32,
            sample_every: 10,
            histogram: HistogramSpec { lo: -6.0, hi: 6.0, bins: 240 },
            interaction: Interaction::Direct,
            start: Start::Infinity,
            stop_at_first_crossing: false,
        }
    }

    pub fn beta(&self) -> f64 {
        beta_of(self.tilde_j)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n == 0 {
            return bad("N must be positive".into());
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive (got {})", self.dt));
        }
        if !(self.tilde_j > 0.0) || !self.e.is_finite() || !(self.c >= 0.0) {
            return bad("need J̃ > 0, finite E and c ≥ 0".into());
        }
        let min_cut = 10.0 * self.e.abs().sqrt().max(1.0);
        if !(self.cutoff >= min_cut) {
            return bad(format!("Λ_cut = {} is below 10·max(1, √|E|) = {min_cut}", self.cutoff));
        }
        if !(self.total_time > 0.0) || !(self.burn_in >= 0.0) {
            return bad("need T > 0 and burn-in ≥ 0".into());
        }
        if self.batches == 0 || self.sample_every == 0 {
            return bad("batches and sample interval must be positive".into());
        }
        let h = &self.histogram;
        if h.bins == 0 || !(h.hi > h.lo) {
            return bad("empty histogram range".into());
        }
        Ok(())
    }
}

pub fn default_cutoff(e: f64) -> f64 {
    50.0 * e.abs().sqrt().max(1.0)
}

/// `max(20, 5/|E* − E|)`, capped at `MAX_BURN_IN` so that runs at the
/// edge itself stay finite.
pub fn default_burn_in(e: f64, tilde_j: f64) -> f64 {
    (5.0 / (spectral_edge(tilde_j) - e).abs()).clamp(20.0, MAX_BURN_IN)
}

pub const MAX_BURN_IN: f64 = 200.0;
