//! Typical value, Gaussian variance and large-deviation rate function of
//! `𝖾 = (1/(N L^d)) ln |det|`.

use num_complex::Complex64;
use sdm_core::numerics::roots::brent;
use sdm_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::model::{MeasureKind, Model};
use crate::pastur::{f_tilde_from_resolvent, pastur_resolvent};
use crate::{d0, d1};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub e: f64,
    /// Conjugate variable, `Φ'(𝖾) = q`.
    pub q: f64,
    pub phi: f64,
}

/// `𝖾(ξ) = f̃(Jξ + μ)` and `Re g` at `λ = −(Jξ + μ)`.
fn e_of_xi(xi: f64, m: &Model) -> Result<(f64, f64)> {
    let s = m.j * xi + m.mu;
    let g = pastur_resolvent(Complex64::new(-s, 0.0), m.j, m.measure())?;
    Ok((f_tilde_from_resolvent(s, g, m.mu, m.j, m.measure()), g.re))
}

pub fn e_typ(m: &Model) -> Result<f64> {
    if m.closed_forms {
        match m.kind {
            MeasureKind::Point => return Ok(d0::e_typ(m.mu, m.j)),
            MeasureKind::Line if m.mu >= d1::mu_b(0.0, m.j) => return d1::e_typ_closed(m.mu, m.j),
            _ => {}
        }
    }
    Ok(e_of_xi(0.0, m)?.0)
}

/// `Var 𝖾 = f'(μ/J)² = J² (Re g(−μ))²`, at leading order in `1/(N L^d)`.
pub fn var_e(m: &Model) -> Result<f64> {
    if m.closed_forms && m.kind == MeasureKind::Point {
        return Ok(d0::var_e(m.mu, m.j));
    }
    let g = e_of_xi(0.0, m)?.1;
    Ok(m.j * m.j * g * g)
}

/// `Φ(𝖾) = ξ²/2` where `f̃(Jξ + μ) = 𝖾` on the branch through `ξ = 0`.
pub fn rate_function(e: f64, m: &Model) -> Result<RatePoint> {
    if m.closed_forms && m.kind == MeasureKind::Point && e < d0::e_c(m.mu, m.j) {
        if let Ok((phi, q)) = d0::rate_complex(e, m.mu, m.j) {
            if e >= d0::e_typ(m.mu, m.j) {
                return Ok(RatePoint { e, q, phi });
            }
        }
    }
    let et = e_typ(m)?;
    let f = |xi: f64| e_of_xi(xi, m).map(|v| v.0 - e).unwrap_or(f64::NAN);
    let xi = if e == et {
        0.0
    } else if e > et {
        let mut hi = 1.0;
        while f(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e8 {
                return Err(Error::OutOfRange(format!("𝖾 = {e} not reached")));
            }
        }
        brent(f, 0.0, hi, 1e-15)?
    } else {
        let lo = xi_at_q_minus_one(m)?;
        if f(lo) > 0.0 {
            return Err(Error::OutOfRange(format!("𝖾 = {e} maps to q ≤ −1")));
        }
        brent(f, lo, 0.0, 1e-15)?
    };
    let (_, re_g) = e_of_xi(xi, m)?;
    let q = if xi == 0.0 { 0.0 } else { -xi / (m.j * re_g) };
    Ok(RatePoint { e, q, phi: 0.5 * xi * xi })
}

/// Saddle position at `q = −1`: the root of `ξ − J Re g` below zero.
fn xi_at_q_minus_one(m: &Model) -> Result<f64> {
    let h = |xi: f64| e_of_xi(xi, m).map(|v| xi - m.j * v.1).unwrap_or(f64::NAN);
    let mut lo = -1e-3;
    while !(h(lo) < 0.0) {
        lo *= 2.0;
        if lo < -1e8 {
            return Err(Error::NoRoot("no saddle at q = −1".into()));
        }
    }
    brent(h, lo, 0.0, 1e-15)
}

/// `max_q (q𝖾 − Σ_q)` over `[q_lo, q_hi]` by a coarse scan followed by
/// golden-section refinement. `Σ_q` must be convex.
pub fn legendre_numeric<F: Fn(f64) -> f64>(e: f64, sigma: F, q_lo: f64, q_hi: f64) -> (f64, f64) {
    let obj = |q: f64| q * e - sigma(q);
    let n = 200;
    let step = (q_hi - q_lo) / n as f64;
    let best = (0..=n).map(|i| q_lo + step * i as f64).fold((q_lo, f64::NEG_INFINITY), |acc, q| {
        let v = obj(q);
        if v > acc.1 {
            (q, v)
        } else {
            acc
        }
    });
    let (mut a, mut b) = ((best.0 - step).max(q_lo), (best.0 + step).min(q_hi));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (obj(c), obj(d));
    while b - a > 1e-10 * (1.0 + a.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = obj(d);
        }
    }
    let q = 0.5 * (a + b);
    (q, obj(q))
}
