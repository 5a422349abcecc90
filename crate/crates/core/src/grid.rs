//! Momentum grids of the hypercubic lattice Laplacian and the free
//! resolvent integrals `∫_k` built on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::{Boundary, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub d: usize,
    pub l: usize,
    pub boundary: Boundary,
}

impl MomentumGrid {
    pub fn new(d: usize, l: usize, boundary: Boundary) -> Self {
        MomentumGrid { d, l, boundary }
    }

    pub fn for_params(p: &ModelParams) -> Self {
        MomentumGrid { d: p.d, l: p.l, boundary: p.boundary }
    }

    /// Single-site grid (`d = 0`), where `Δ = 0`.
    pub fn point() -> Self {
        MomentumGrid { d: 0, l: 1, boundary: Boundary::Periodic }
    }

    pub fn len(&self) -> usize {
        self.l.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One-dimensional Laplacian eigenvalues.
    pub fn line_eigenvalues(&self) -> Vec<f64> {
        let l = self.l as f64;
        match self.boundary {
            Boundary::Periodic => (0..self.l)
                .map(|n| 2.0 * ((2.0 * std::f64::consts::PI * n as f64 / l).cos() - 1.0))
                .collect(),
            Boundary::Dirichlet => (1..=self.l)
                .map(|n| 2.0 * ((std::f64::consts::PI * n as f64 / (l + 1.0)).cos() - 1.0))
                .collect(),
        }
    }

    /// All `L^d` eigenvalues `Δ(k)`, as tensor sums of the line values in
    /// lexicographic order of the mode indices.
    pub fn laplacian_eigenvalues(&self) -> Vec<f64> {
        let line = self.line_eigenvalues();
        let mut out = vec![0.0];
        for _ in 0..self.d {
            out = out.iter().flat_map(|&a| line.iter().map(move |&b| a + b)).collect();
        }
        out
    }

    pub fn measure(&self, t: f64) -> LatticeMeasure {
        LatticeMeasure::new(self, t)
    }
}

/// Normalized momentum integral `∫_k` of functions of the free energies
/// `ε_k = −tΔ(k) ≥ 0`, so that `μ − tΔ(k) = μ + ε_k`.
pub trait KMeasure: Send + Sync {
    /// `I(z) = ∫_k 1/(z + ε_k)`.
    fn resolvent(&self, z: Complex64) -> Complex64;

    /// `∫_k 1/(z + ε_k)²`.
    fn resolvent_sq(&self, z: Complex64) -> Complex64;

    /// `∫_k [ln(z + ε_k) − ln(μ + ε_k)]` on the principal branch.
    /// Only the real part is branch independent.
    fn log_ratio(&self, z: Complex64, mu: f64) -> Complex64;

    /// `∫_k ln(μ + ε_k)`, if finite.
    fn log_free(&self, mu: f64) -> Option<f64>;

    /// Bottom of the free spectrum, `min_k ε_k`.
    fn floor(&self) -> f64;

    /// Top of the free spectrum, if bounded.
    fn ceiling(&self) -> Option<f64>;

    /// True for the single-site measure.
    fn is_point(&self) -> bool {
        false
    }
}

/// Uniform measure over the modes of a finite lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeMeasure {
    /// Distinct free energies with their weights.
    levels: Vec<(f64, f64)>,
    point: bool,
}

impl LatticeMeasure {
    pub fn new(grid: &MomentumGrid, t: f64) -> Self {
        let mut eps: Vec<f64> = grid.laplacian_eigenvalues().into_iter().map(|d| (-t * d).max(0.0)).collect();
        eps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let total = eps.len() as f64;
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for e in eps {
            match levels.last_mut() {
                Some((v, w)) if (e - *v).abs() <= 1e-13 * (1.0 + v.abs()) => *w += 1.0,
                _ => levels.push((e, 1.0)),
            }
        }
        for lv in &mut levels {
            lv.1 /= total;
        }
        LatticeMeasure { levels, point: grid.d == 0 }
    }

    pub fn levels(&self) -> &[(f64, f64)] {
        &self.levels
    }
}

impl KMeasure for LatticeMeasure {
    fn resolvent(&self, z: Complex64) -> Complex64 {
        self.levels.iter().map(|&(e, w)| w / (z + e)).sum()
    }

    fn resolvent_sq(&self, z: Complex64) -> Complex64 {
        self.levels.iter().map(|&(e, w)| w / ((z + e) * (z + e))).sum()
    }

    fn log_ratio(&self, z: Complex64, mu: f64) -> Complex64 {
        self.levels
            .iter()
            .map(|&(e, w)| w * ((z + e).ln() - Complex64::new(mu + e, 0.0).ln()))
            .sum()
    }

    fn log_free(&self, mu: f64) -> Option<f64> {
        if self.levels.iter().any(|&(e, _)| mu + e <= 0.0) {
            return None;
        }
        Some(self.levels.iter().map(|&(e, w)| w * (mu + e).ln()).sum())
    }

    fn floor(&self) -> f64 {
        self.levels[0].0
    }

    fn ceiling(&self) -> Option<f64> {
        self.levels.last().map(|l| l.0)
    }

    fn is_point(&self) -> bool {
        self.point
    }
}

/// The `d = 1` continuum `∫dk/(2π)` with `ε_k = t k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumLine {
    pub t: f64,
}

impl Default for ContinuumLine {
    fn default() -> Self {
        ContinuumLine { t: 1.0 }
    }
}

impl KMeasure for ContinuumLine {
    fn resolvent(&self, z: Complex64) -> Complex64 {
        0.5 / (self.t.sqrt() * z.sqrt())
    }

    fn resolvent_sq(&self, z: Complex64) -> Complex64 {
        let s = z.sqrt();
        0.25 / (self.t.sqrt() * s * s * s)
    }

    fn log_ratio(&self, z: Complex64, mu: f64) -> Complex64 {
        // Each log diverges in the ultraviolet; the difference does not.
        (z.sqrt() - Complex64::new(mu, 0.0).sqrt()) / self.t.sqrt()
    }

    fn log_free(&self, _mu: f64) -> Option<f64> {
        None
    }

    fn floor(&self) -> f64 {
        0.0
    }

    fn ceiling(&self) -> Option<f64> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn small_periodic_lines() {
        let v = MomentumGrid::new(1, 2, Boundary::Periodic).laplacian_eigenvalues();
        assert!((v[0] - 0.0).abs() < 1e-15 && (v[1] + 4.0).abs() < 1e-15);
        let v = MomentumGrid::new(1, 4, Boundary::Periodic).laplacian_eigenvalues();
        for (a, b) in v.iter().zip([0.0, -2.0, -4.0, -2.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(MomentumGrid::point().laplacian_eigenvalues(), vec![0.0]);
    }

    fn dense_laplacian(d: usize, l: usize, boundary: Boundary) -> DMatrix<f64> {
        let m = l.pow(d as u32);
        let mut a = DMatrix::zeros(m, m);
        for s in 0..m {
            let mut coords = vec![0; d];
            let mut r = s;
            for c in coords.iter_mut() {
                *c = r % l;
                r /= l;
            }
            for axis in 0..d {
                a[(s, s)] -= 2.0;
                for step in [1isize, -1] {
                    let x = coords[axis] as isize + step;
                    let nx = match boundary {
                        Boundary::Periodic => x.rem_euclid(l as isize),
                        Boundary::Dirichlet if x < 0 || x >= l as isize => continue,
                        Boundary::Dirichlet => x,
                    };
                    let mut nc = coords.clone();
                    nc[axis] = nx as usize;
                    let idx = nc.iter().rev().fold(0, |acc, &c| acc * l + c);
                    a[(s, idx)] += 1.0;
                }
            }
        }
        a
    }

    #[test]
    fn matches_dense_laplacian() {
        for &(d, l, b) in &[
            (2, 2, Boundary::Periodic),
            (2, 3, Boundary::Periodic),
            (1, 7, Boundary::Dirichlet),
            (2, 4, Boundary::Dirichlet),
            (3, 3, Boundary::Periodic),
        ] {
            let grid = sorted(MomentumGrid::new(d, l, b).laplacian_eigenvalues());
            let dense = sorted(dense_laplacian(d, l, b).symmetric_eigenvalues().iter().copied().collect());
            assert_eq!(grid.len(), dense.len());
            for (a, e) in grid.iter().zip(&dense) {
                assert!((a - e).abs() < 1e-12, "d={d} l={l} {b}: {a} vs {e}");
            }
        }
        let v = sorted(MomentumGrid::new(2, 2, Boundary::Periodic).laplacian_eigenvalues());
        for (a, b) in v.iter().zip([-8.0, -4.0, -4.0, 0.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn continuum_resolvent_matches_quadrature() {
        // ∫dk/2π 1/(z + k²) by trapezoid on a long window with tail correction.
        let line = ContinuumLine::default();
        let z = Complex64::new(0.7, 0.4);
        let (kmax, n) = (400.0, 800_000);
        let h = 2.0 * kmax / n as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let k = -kmax + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            s += w / (z + k * k);
        }
        s = s * h / (2.0 * std::f64::consts::PI) + 1.0 / (std::f64::consts::PI * kmax);
        assert!((s - line.resolvent(z)).norm() < 1e-8);
        // log_ratio is an antiderivative of the resolvent in z.
        let h = 1e-5;
        let dz = (line.log_ratio(z + h, 1.0) - line.log_ratio(z - h, 1.0)) / (2.0 * h);
        assert!((dz - line.resolvent(z)).norm() < 1e-8);
        let dz = (line.resolvent(z + h) - line.resolvent(z - h)) / (2.0 * h);
        assert!((dz + line.resolvent_sq(z)).norm() < 1e-8);
    }

    #[test]
    fn lattice_measure_counts_modes() {
        let grid = MomentumGrid::new(2, 6, Boundary::Periodic);
        let m = grid.measure(1.5);
        let total: f64 = m.levels().iter().map(|l| l.1).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(m.floor(), 0.0);
        let direct: f64 =
            grid.laplacian_eigenvalues().iter().map(|d| 1.0 / (2.0 - 1.5 * d)).sum::<f64>() / grid.len() as f64;
        assert!((m.resolvent(Complex64::new(2.0, 0.0)).re - direct).abs() < 1e-14);
    }
}
