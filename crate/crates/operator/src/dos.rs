//! Empirical density of states by inertia counting: the number of
//! eigenvalues of `K = −tΔ + W` below `α` is the number of negative
//! eigenvalues of `K − α`, read off the block recursion.

use rayon::prelude::*;
use sdm_core::{ContinuumParams, Error, ModelParams, RandomStream, Result};
use serde::{Deserialize, Serialize};

use crate::logdet::logdet_block_recursion;
use crate::realization::sample_operator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosHistogram {
    pub edges: Vec<f64>,
    /// Eigenvalues per bin, summed over realizations.
    pub counts: Vec<f64>,
    pub realizations: usize,
    /// `N·M` of each realization.
    pub dim: usize,
}

impl DosHistogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Density per channel per site.
    pub fn density(&self) -> Vec<f64> {
        let norm = (self.realizations * self.dim) as f64;
        self.counts.iter().zip(self.edges.windows(2)).map(|(c, w)| c / (norm * (w[1] - w[0]))).collect()
    }

    /// Same counts on a coarser grid whose edges are a subset of these.
    pub fn rebin(&self, edges: &[f64]) -> Option<DosHistogram> {
        let idx: Vec<usize> = edges
            .iter()
            .map(|e| self.edges.iter().position(|x| (x - e).abs() <= 1e-12 * (1.0 + e.abs())))
            .collect::<Option<_>>()?;
        if idx.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        let counts = idx.windows(2).map(|w| self.counts[w[0]..w[1]].iter().sum()).collect();
        Some(DosHistogram { edges: edges.to_vec(), counts, ..self.clone() })
    }

    /// Density per channel per unit length for lattice spacing `a`.
    pub fn density_per_length(&self, a: f64) -> Vec<f64> {
        self.density().into_iter().map(|r| r / a).collect()
    }
}

/// Uniform bin edges.
pub fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect()
}

/// Eigenvalue counting function of `K` at each of `points` for one
/// realization (`μ` is ignored: the spectrum of `K` itself is counted).
pub fn counting_function(p: &ModelParams, points: &[f64], stream: RandomStream) -> Result<Vec<usize>> {
    let real = sample_operator(&ModelParams { mu: 0.0, e: 0.0, ..*p }, stream)?;
    points.iter().map(|&a| logdet_block_recursion(&real, a).map(|r| r.sign_flips)).collect()
}

/// Histogram of the spectrum of `K` over `realizations` draws, realization
/// `i` on `stream.child(i)`.
pub fn dos_histogram(p: &ModelParams, edges: &[f64], realizations: usize, stream: RandomStream) -> Result<DosHistogram> {
    if p.d != 1 {
        return Err(Error::InvalidParams("inertia counting needs d = 1".into()));
    }
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("bin edges must be increasing".into()));
    }
    let per: Vec<Vec<usize>> = (0..realizations as u64)
        .into_par_iter()
        .map(|i| counting_function(p, edges, stream.child(i)))
        .collect::<Result<_>>()?;
    let mut counts = vec![0.0; edges.len() - 1];
    for c in &per {
        for (k, w) in c.windows(2).enumerate() {
            counts[k] += (w[1] - w[0]) as f64;
        }
    }
    Ok(DosHistogram { edges: edges.to_vec(), counts, realizations, dim: p.dim() })
}

/// Lattice parameters approximating the continuum operator at spacing `a`:
/// `t = t̃/a²`, `J² = J̃²/a`, `L = length/a` (rounded, with a warning).
pub fn map_continuum_to_lattice(cont: &ContinuumParams, a: f64, n: usize) -> Result<ModelParams> {
    cont.to_lattice(a, n).map(|(p, _)| p)
}

/// `L¹` distance `Σ |ρ̂ − ρ| Δα` between a histogram density and a
/// reference evaluated at bin centers.
pub fn l1_distance(edges: &[f64], density: &[f64], reference: impl Fn(f64) -> f64) -> f64 {
    edges
        .windows(2)
        .zip(density)
        .map(|(w, r)| (r - reference(0.5 * (w[0] + w[1]))).abs() * (w[1] - w[0]))
        .sum()
}

/// Spectral edge from a square-root onset `ρ ≈ s(α − α_e)^{1/2}`: a
/// straight-line fit of `ρ²` against `α` over the bins centred in
/// `[lo, hi]`, extrapolated to zero.
pub fn edge_from_sqrt_onset(centers: &[f64], density: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) =
        centers.iter().zip(density).filter(|(&c, _)| c >= lo && c <= hi).map(|(&c, &r)| (c, r * r)).unzip();
    if x.len() < 3 {
        return None;
    }
    let fit = sdm_core::numerics::stats::linear_fit(&x, &y, None);
    (fit.slope > 0.0).then(|| -fit.intercept / fit.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemble::assemble_dense;
    use sdm_core::Boundary;

    #[test]
    fn counting_matches_dense_spectrum() {
        let p = ModelParams { d: 1, n: 3, l: 7, t: 1.2, j: 0.8, c: 0.3, boundary: Boundary::Periodic, ..Default::default() };
        let s = RandomStream::new(4, 2);
        let real = sample_operator(&ModelParams { mu: 0.0, e: 0.0, ..p }, s).unwrap();
        let ev = assemble_dense(&real, 0.0).unwrap().symmetric_eigenvalues();
        let pts: Vec<f64> = (0..30).map(|k| -3.0 + 0.37 * k as f64).collect();
        let counts = counting_function(&p, &pts, s).unwrap();
        for (a, c) in pts.iter().zip(&counts) {
            assert_eq!(*c, ev.iter().filter(|&&x| x < *a).count());
        }
    }

    #[test]
    fn histogram_mass_counts_all_levels() {
        let p = ModelParams { d: 1, n: 2, l: 5, t: 1.0, j: 0.5, c: 0.0, boundary: Boundary::Periodic, ..Default::default() };
        let h = dos_histogram(&p, &uniform_edges(-10.0, 15.0, 25), 4, RandomStream::new(1, 1)).unwrap();
        let mass: f64 = h.density().iter().sum::<f64>() * 1.0;
        assert!((mass - 1.0).abs() < 1e-12);
        let coarse = h.rebin(&uniform_edges(-10.0, 15.0, 5)).unwrap();
        assert_eq!(coarse.counts.iter().sum::<f64>(), h.counts.iter().sum::<f64>());
        assert!(h.rebin(&[-10.0, 0.3]).is_none());
    }

    #[test]
    fn l1_of_identical_is_zero() {
        let e = uniform_edges(0.0, 1.0, 10);
        let d: Vec<f64> = e.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        assert_eq!(l1_distance(&e, &d, |x| x), 0.0);
        let rho: Vec<f64> = d.iter().map(|x| (3.0 * (x - 0.2)).max(0.0).sqrt()).collect();
        assert!((edge_from_sqrt_onset(&d, &rho, 0.3, 1.0).unwrap() - 0.2).abs() < 1e-12);
    }
}
