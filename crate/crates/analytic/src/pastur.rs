//! Self-consistent resolvent of `K = −tΔ + J H` and the regularized
//! log-potential `f` built from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use sdm_core::numerics::quad;
use sdm_core::{Error, KMeasure, Registry, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PasturSolver {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Residual below which Newton steps take over.
    pub newton_switch: f64,
}

impl Default for PasturSolver {
    fn default() -> Self {
        PasturSolver { damping: 0.5, tol: 1e-12, max_iter: 10_000, newton_switch: 1e-4 }
    }
}

/// Damped iterations before Newton steps are tried regardless of residual.
const STALL: usize = 50;

impl PasturSolver {
    /// Solves `g = ∫_k 1/(λ − ε_k − J²g)` for `g = i r_λ`, evaluated just
    /// below the real axis so that `Im g ≥ 0`.
    pub fn solve(&self, lambda: Complex64, j: f64, m: &dyn KMeasure) -> Result<Complex64> {
        let lambda = if lambda.im > 0.0 { lambda.conj() } else { lambda };
        let j2 = j * j;
        let map = |g: Complex64| -m.resolvent(j2 * g - lambda);
        let mut g = Complex64::new(0.0, 1.0 / (1.0 + j));
        let mut residual = f64::INFINITY;
        for it in 0..self.max_iter {
            let fg = map(g);
            residual = (fg - g).norm();
            if residual < self.tol * (1.0 + g.norm()) {
                // One last Newton polish.
                let dh = 1.0 - j2 * m.resolvent_sq(j2 * g - lambda);
                let trial = g - (g - fg) / dh;
                if trial.im >= 0.0 && trial.is_finite() && (map(trial) - trial).norm() < residual {
                    g = trial;
                }
                return finish(g, lambda);
            }
            // Newton once close, or once damping has visibly stalled (the
            // map is marginal at the band edges). Steps are halved until
            // the residual drops.
            if residual < self.newton_switch || it >= STALL {
                let dh = 1.0 - j2 * m.resolvent_sq(j2 * g - lambda);
                let step = (g - fg) / dh;
                let mut t = 1.0;
                let mut accepted = false;
                for _ in 0..40 {
                    let trial = g - step * t;
                    if trial.im >= 0.0 && trial.is_finite() && (map(trial) - trial).norm() < residual {
                        g = trial;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
                if accepted {
                    continue;
                }
            }
            g = (1.0 - self.damping) * g + self.damping * fg;
        }
        Err(Error::NonConvergence { context: format!("resolvent at λ = {lambda}"), iterations: self.max_iter, residual })
    }
}

fn finish(g: Complex64, lambda: Complex64) -> Result<Complex64> {
    if g.im < -1e-10 * (1.0 + g.norm()) {
        return Err(Error::NonConvergence {
            context: format!("resolvent branch at λ = {lambda} has negative density"),
            iterations: 0,
            residual: g.im,
        });
    }
    Ok(Complex64::new(g.re, g.im.max(0.0)))
}

pub fn pastur_resolvent(lambda: Complex64, j: f64, m: &dyn KMeasure) -> Result<Complex64> {
    PasturSolver::default().solve(lambda, j, m)
}

/// `ρ_K(α) = Im g(α − i0)/π`.
pub fn pastur_density(alpha: f64, j: f64, m: &dyn KMeasure) -> Result<f64> {
    Ok(pastur_resolvent(Complex64::new(alpha, 0.0), j, m)?.im / PI)
}

/// Regularized log-potential at shift `s`:
/// `f̃(s) = ∫dα ρ_K(α) ln|α + s| − ∫_k ln(μ + ε_k)`, so that
/// `f(ξ + μ/J) − ∫_k ln(μ − tΔ) = f̃(Jξ + μ)`.
pub trait LogPotential: Send + Sync {
    fn f_tilde(&self, s: f64, mu: f64, j: f64, m: &dyn KMeasure) -> Result<f64>;
}

/// Uses `∫ρ ln(λ − α) = ∫_k ln(λ − ε_k − J²g) + J²g²/2`, which needs a
/// single resolvent solve.
pub struct ResolventIdentity;

/// Direct quadrature of the density against the logarithm. Needs a measure
/// with a finite log subtraction (any finite lattice).
pub struct DensityQuadrature {
    pub tol: f64,
}

impl LogPotential for ResolventIdentity {
    fn f_tilde(&self, s: f64, mu: f64, j: f64, m: &dyn KMeasure) -> Result<f64> {
        let g = pastur_resolvent(Complex64::new(-s, 0.0), j, m)?;
        Ok(f_tilde_from_resolvent(s, g, mu, j, m))
    }
}

/// `f̃` given the resolvent `g = g(−s)`.
pub fn f_tilde_from_resolvent(s: f64, g: Complex64, mu: f64, j: f64, m: &dyn KMeasure) -> f64 {
    let j2 = j * j;
    m.log_ratio(s + j2 * g, mu).re + 0.5 * j2 * (g * g).re
}

impl LogPotential for DensityQuadrature {
    fn f_tilde(&self, s: f64, mu: f64, j: f64, m: &dyn KMeasure) -> Result<f64> {
        let free = m
            .log_free(mu)
            .ok_or_else(|| Error::OutOfRange("density quadrature needs a finite lattice and μ + ε > 0".into()))?;
        let (lo, hi) = support(j, m)?;
        let rho = |a: f64| pastur_density(a, j, m).unwrap_or(0.0);
        let mut breaks = vec![lo];
        if -s > lo && -s < hi {
            breaks.push(-s);
        }
        breaks.push(hi);
        let v = quad::integrate_pieces(|a| rho(a) * (a + s).abs().ln(), &breaks, self.tol)?;
        Ok(v - free)
    }
}

/// A bracket containing the support of `ρ_K`: the free spectrum widened by
/// the semicircle radius.
pub fn support(j: f64, m: &dyn KMeasure) -> Result<(f64, f64)> {
    let top = m.ceiling().ok_or_else(|| Error::OutOfRange("unbounded free spectrum".into()))?;
    Ok((m.floor() - 2.0 * j, top + 2.0 * j))
}

pub fn log_potential_registry() -> Registry<dyn LogPotential> {
    Registry::<dyn LogPotential>::new()
        .with("identity", Box::new(ResolventIdentity))
        .with("quadrature", Box::new(DensityQuadrature { tol: 1e-10 }))
}

/// `f(ξ + μ/J) − ∫_k ln(μ − tΔ(k))` for the default (identity) route.
pub fn f_integral(xi: f64, mu: f64, j: f64, m: &dyn KMeasure) -> Result<f64> {
    ResolventIdentity.f_tilde(j * xi + mu, mu, j, m)
}
