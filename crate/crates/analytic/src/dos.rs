//! Density of states of the continuum `d = 1` operator
//! `K = −∂² + J̃ H(τ)` at `c = 0`, and interchangeable evaluators for it.

use std::f64::consts::PI;

use sdm_core::Registry;
use serde::{Deserialize, Serialize};

use crate::cubic::{beta_of, resolvent_constant, spectral_edge_scaled};

fn sgn_cbrt(x: f64) -> f64 {
    x.signum() * x.abs().cbrt()
}

/// Reduced variable `Λ = α/(3(J̃/2)^{4/3})`; the edge sits at `Λ = −1`.
pub fn reduced_energy(alpha: f64, tilde_j: f64) -> f64 {
    alpha / (3.0 * (0.5 * tilde_j).powf(4.0 / 3.0))
}

/// `r_c(Λ) = (w_r²/4)√((2/w_r)³ − 1)`, zero below `Λ = −1`.
pub fn r_c(lambda: f64) -> f64 {
    if lambda <= -1.0 {
        return 0.0;
    }
    let s = (1.0 + lambda.powi(3)).sqrt();
    let a = (1.0 + s).cbrt();
    let b = sgn_cbrt(1.0 - s);
    // a + b with a³ + b³ = 2, written without cancellation.
    let w = 2.0 / (a * a - a * b + b * b);
    let inner = (2.0 / w).powi(3) - 1.0;
    0.25 * w * w * inner.max(0.0).sqrt()
}

/// `ρ_K(α)` from the `w_r`/`r_c` parameterization.
pub fn dos_continuum_d1(alpha: f64, tilde_j: f64) -> f64 {
    r_c(reduced_energy(alpha, tilde_j)) / (2.0 * PI * (0.5 * tilde_j).powf(2.0 / 3.0))
}

/// `ρ_K(α)` from the Cardano form
/// `(√3/(4πβ^{1/3}))((1+s)^{2/3} − |1−s|^{2/3})`, `s = √(1+Λ³)`.
pub fn dos_continuum_d1_cardano(alpha: f64, tilde_j: f64) -> f64 {
    let lambda = reduced_energy(alpha, tilde_j);
    if lambda <= -1.0 {
        return 0.0;
    }
    let s = (1.0 + lambda.powi(3)).sqrt();
    let (p, m) = ((1.0 + s).cbrt(), sgn_cbrt(1.0 - s));
    // p² − m² = (p − m)(p + m) with p³ + m³ = 2.
    let diff = (p - m) * 2.0 / (p * p - p * m + m * m);
    3f64.sqrt() / (4.0 * PI * beta_of(tilde_j).cbrt()) * diff
}

/// `ρ_K(α) = (1/π) d Im 𝒥/dE` at `E = α`, i.e. the derivative of the
/// stationary current of the eigenvalue diffusion, evaluated as
/// `−(2/(πβ)) Im z_a²`.
pub fn dos_from_current(alpha: f64, tilde_j: f64) -> f64 {
    let beta = beta_of(tilde_j);
    let za = resolvent_constant(alpha, beta).double_root;
    (-2.0 / (PI * beta) * (za * za).im).max(0.0)
}

/// Free density `1/(2π√α)` on `α > 0`.
pub fn free_dos(alpha: f64) -> f64 {
    if alpha > 0.0 {
        1.0 / (2.0 * PI * alpha.sqrt())
    } else {
        0.0
    }
}

/// A way to evaluate the continuum density of states.
pub trait DosEvaluator: Send + Sync {
    fn density(&self, alpha: f64, tilde_j: f64) -> f64;
}

struct WrForm;
struct CardanoForm;
struct CurrentForm;

impl DosEvaluator for WrForm {
    fn density(&self, alpha: f64, tilde_j: f64) -> f64 {
        dos_continuum_d1(alpha, tilde_j)
    }
}

impl DosEvaluator for CardanoForm {
    fn density(&self, alpha: f64, tilde_j: f64) -> f64 {
        dos_continuum_d1_cardano(alpha, tilde_j)
    }
}

impl DosEvaluator for CurrentForm {
    fn density(&self, alpha: f64, tilde_j: f64) -> f64 {
        dos_from_current(alpha, tilde_j)
    }
}

/// Registered evaluators: `wr`, `cardano`, `current`.
pub fn dos_registry() -> Registry<dyn DosEvaluator> {
    Registry::<dyn DosEvaluator>::new()
        .with("wr", Box::new(WrForm))
        .with("cardano", Box::new(CardanoForm))
        .with("current", Box::new(CurrentForm))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensityCurve {
    pub alpha: Vec<f64>,
    pub rho: Vec<f64>,
    pub edge: f64,
}

impl SpectralDensityCurve {
    pub fn sample(eval: &dyn DosEvaluator, tilde_j: f64, lo: f64, hi: f64, points: usize) -> Self {
        let alpha: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1).max(1) as f64).collect();
        let rho = alpha.iter().map(|&a| eval.density(a, tilde_j)).collect();
        SpectralDensityCurve { alpha, rho, edge: spectral_edge_scaled(tilde_j) }
    }
}
