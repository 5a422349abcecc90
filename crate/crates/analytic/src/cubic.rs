//! Stationary eigenvalue diffusion in the cubic potential: the double root
//! `z_a`, the integration constant `𝒥(E)`, the stationary density in both
//! phases and the confinement barrier.
//!
//! Throughout, `a = −E` and `β = 2J̃²`; `P(z) = (z² − a)² − β(z − 𝒥)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use sdm_core::numerics::quad;
use sdm_core::{DbmPhase, Error, Result};
use serde::{Deserialize, Serialize};

/// `E* = −(3/4)(2J̃²)^{2/3}`.
pub fn spectral_edge(tilde_j: f64) -> f64 {
    -0.75 * (2.0 * tilde_j * tilde_j).powf(2.0 / 3.0)
}

/// Same edge written as `−3(J̃/2)^{4/3}`.
pub fn spectral_edge_scaled(tilde_j: f64) -> f64 {
    -3.0 * (0.5 * tilde_j).powf(4.0 / 3.0)
}

/// `a* = (3/4)β^{2/3}`: the confined phase is `a > a*`.
pub fn critical_a(beta: f64) -> f64 {
    0.75 * beta.powf(2.0 / 3.0)
}

pub fn beta_of(tilde_j: f64) -> f64 {
    2.0 * tilde_j * tilde_j
}

/// Real cube root keeping the sign.
fn sgn_cbrt(x: f64) -> f64 {
    x.signum() * x.abs().cbrt()
}

/// `Im √(x + iy)` for `y ≥ 0`, without cancellation for either sign of `x`.
fn im_sqrt(x: f64, y: f64) -> f64 {
    let m = x.hypot(y);
    if x > 0.0 {
        y / (2.0 * (0.5 * (m + x)).sqrt())
    } else {
        (0.5 * (m - x)).sqrt()
    }
}

/// Double root of `P`, i.e. the root of `z³ − a z − β/4 = 0` selected by
/// phase: the smallest real root for `a ≥ a*` (trigonometric form), the
/// root with `Im z > 0` otherwise (Cardano form).
pub fn double_root(a: f64, beta: f64) -> Complex64 {
    let a_star = critical_a(beta);
    if a >= a_star {
        let r = 2.0 * (a / 3.0).sqrt();
        let arg = (3.0 * beta / (8.0 * a)) * (3.0 / a).sqrt();
        let theta = arg.clamp(-1.0, 1.0).acos();
        Complex64::new(r * ((theta + 2.0 * PI) / 3.0).cos(), 0.0)
    } else {
        let s = (1.0 - (a / a_star).powi(3)).sqrt();
        let scale = 0.5 * beta.cbrt();
        let u = scale * (1.0 + s).cbrt();
        let v = scale * sgn_cbrt(1.0 - s);
        Complex64::new(-0.5 * (u + v), 0.5 * 3f64.sqrt() * (u - v))
    }
}

/// `P'(z)/4 = z³ − a z − β/4`.
pub fn double_root_residual(z: Complex64, a: f64, beta: f64) -> Complex64 {
    z * z * z - a * z - beta / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventConstant {
    pub e: f64,
    pub beta: f64,
    pub value: Complex64,
    pub double_root: Complex64,
    /// `(γ−, γ+)`.
    pub outer_roots: (Complex64, Complex64),
    pub phase: DbmPhase,
}

pub fn resolvent_constant(e: f64, beta: f64) -> ResolventConstant {
    let a = -e;
    let za = double_root(a, beta);
    let w = za * za - a;
    let value = za - w * w / beta;
    let disc = (2.0 * (a - za * za)).sqrt();
    let phase = if a >= critical_a(beta) { DbmPhase::Confined } else { DbmPhase::Current };
    let value = if phase == DbmPhase::Confined { Complex64::new(value.re, 0.0) } else { value };
    ResolventConstant { e, beta, value, double_root: za, outer_roots: (-za - disc, -za + disc), phase }
}

impl ResolventConstant {
    pub fn a(&self) -> f64 {
        -self.e
    }

    /// `P(z) = (z² + E)² − β(z − 𝒥)`.
    pub fn poly(&self, z: Complex64) -> Complex64 {
        let w = z * z + self.e;
        w * w - self.beta * (z - self.value)
    }

    /// `(z − z_a)²(z − γ−)(z − γ+)`.
    pub fn factored(&self, z: Complex64) -> Complex64 {
        let d = z - self.double_root;
        d * d * (z - self.outer_roots.0) * (z - self.outer_roots.1)
    }

    /// Both roots `G±` of `(β/4)G² + (E + z²)G + z − 𝒥 = 0`.
    pub fn branches(&self, z: Complex64) -> (Complex64, Complex64) {
        let b = z * z + self.e;
        let root = self.poly(z).sqrt();
        let k = 2.0 / self.beta;
        (k * (-b + root), k * (-b - root))
    }

    /// Residual of the stationary quadratic for a candidate `G`.
    pub fn quadratic_residual(&self, z: Complex64, g: Complex64) -> Complex64 {
        z + (self.e + z * z) * g + 0.25 * self.beta * g * g - self.value
    }

    /// Stationary density of the diffusion, `(2/(βπ)) Im √P(λ)`. In the
    /// confined phase this is `(2/(βπ))(λ − z_a)√((λ − γ−)(γ+ − λ))` on
    /// the support.
    pub fn density(&self, lambda: f64) -> f64 {
        let z = self.double_root.re;
        match self.support() {
            Some((gm, gp)) => {
                if lambda <= gm || lambda >= gp {
                    0.0
                } else {
                    2.0 / (self.beta * PI) * (lambda - z) * ((lambda - gm) * (gp - lambda)).sqrt()
                }
            }
            None => {
                let w = lambda * lambda + self.e;
                let re = w * w - self.beta * (lambda - self.value.re);
                let im = self.beta * self.value.im;
                2.0 / (self.beta * PI) * im_sqrt(re, im)
            }
        }
    }

    /// Mean of the stationary density, `−Re 𝒥`.
    pub fn mean_position(&self) -> f64 {
        -self.value.re
    }

    /// Stationary current through infinity, `Im 𝒥/π`.
    pub fn current(&self) -> f64 {
        self.value.im / PI
    }

    /// Support `[γ−, γ+]` in the confined phase.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self.phase {
            DbmPhase::Confined => Some((self.outer_roots.0.re, self.outer_roots.1.re)),
            DbmPhase::Current => None,
        }
    }
}

pub fn dbm_stationary_density(lambda: f64, e: f64, beta: f64) -> f64 {
    resolvent_constant(e, beta).density(lambda)
}

/// Confined-phase density as `(2/(βπ))√(−P(λ))` from the unfactored
/// polynomial.
pub fn confined_density(lambda: f64, e: f64, beta: f64) -> Result<f64> {
    let rc = resolvent_constant(e, beta);
    let (gm, gp) = rc.support().ok_or_else(|| Error::OutOfPhase(format!("E = {e} is not below the edge")))?;
    if lambda <= gm || lambda >= gp {
        return Ok(0.0);
    }
    let p = rc.poly(Complex64::new(lambda, 0.0)).re;
    Ok(2.0 / (beta * PI) * (-p).max(0.0).sqrt())
}

/// Barrier height in closed form, valid for `E < E*`.
pub fn barrier_height(e: f64, beta: f64) -> Result<f64> {
    let a = -e;
    if a <= critical_a(beta) {
        return Err(Error::OutOfPhase(format!("barrier needs E < E* (E = {e})")));
    }
    let za = double_root(a, beta).re;
    let first = (2.0 / 3.0) * a * (6.0 * za * za - 2.0 * a).max(0.0).sqrt();
    let inner = (4.0 * (-za).powf(1.5) / beta.sqrt() - 2f64.sqrt()).max(0.0).sqrt() / 2f64.powf(0.75);
    Ok(first - beta * inner.asinh())
}

/// Barrier as the defining integral `∫_{z_a}^{γ−}(λ − z_a)√((γ− − λ)(γ+ − λ)) dλ`.
pub fn barrier_quadrature(e: f64, beta: f64, tol: f64) -> Result<f64> {
    let rc = resolvent_constant(e, beta);
    let (gm, gp) = rc.support().ok_or_else(|| Error::OutOfPhase(format!("barrier needs E < E* (E = {e})")))?;
    let za = rc.double_root.re;
    quad::integrate(|l| (l - za) * ((gm - l) * (gp - l)).max(0.0).sqrt(), za, gm, tol)
}

/// Leading behaviour `(4/5)√2·3^{1/4}β^{1/6}(E* − E)^{5/4}` near the edge.
pub fn barrier_near_edge(e: f64, beta: f64) -> f64 {
    let de = -critical_a(beta) - e;
    0.8 * 2f64.sqrt() * 3f64.powf(0.25) * beta.powf(1.0 / 6.0) * de.powf(1.25)
}

/// Leading behaviour `(4/3)|E|^{3/2}` deep in the confined phase.
pub fn barrier_deep(e: f64) -> f64 {
    4.0 / 3.0 * e.abs().powf(1.5)
}

/// Arrhenius-order tail estimate `exp(−N U/J̃²)` of the density of states
/// below the edge. No prefactor.
pub fn dos_tail_estimate(alpha: f64, n: usize, tilde_j: f64) -> Result<f64> {
    let u = barrier_height(alpha, beta_of(tilde_j))?;
    Ok((-(n as f64) * u / (tilde_j * tilde_j)).exp())
}
