//! Adaptive wrappers over double-exponential quadrature.

use crate::error::{Error, Result};

const MAX_PANELS: usize = 400;

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Panel {
    let out = quadrature::integrate(f, a, b, tol);
    Panel { a, b, value: out.integral, error: out.error_estimate }
}

/// `∫_a^b f` to absolute tolerance `tol`. The panel with the largest error
/// estimate is bisected until the summed estimate meets `tol` or the
/// panel budget runs out. Endpoint singularities are handled by the
/// tanh-sinh rule itself.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = vec![panel(&f, a, b, tol)];
    loop {
        let total: f64 = panels.iter().map(|p| p.error).sum();
        if total <= tol || !total.is_finite() {
            if !total.is_finite() {
                return Err(Error::QuadratureFailure { estimate: total });
            }
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureFailure { estimate: total });
        }
        let worst = (0..panels.len()).max_by(|&i, &j| panels[i].error.total_cmp(&panels[j].error)).unwrap_or(0);
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        let sub = tol / panels.len().max(1) as f64;
        panels.push(panel(&f, p.a, m, sub));
        panels.push(panel(&f, m, p.b, sub));
    }
}

/// Sum of [`integrate`] over consecutive panels `[x_i, x_{i+1}]`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Result<f64> {
    let n = breaks.len().saturating_sub(1).max(1) as f64;
    breaks.windows(2).map(|w| integrate(&f, w[0], w[1], tol / n)).sum()
}

/// `∫_a^∞ f` through `x = a + s·u/(1 − u)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> Result<f64> {
    integrate(
        |u| {
            let w = 1.0 - u;
            scale * f(a + scale * u / w) / (w * w)
        },
        0.0,
        1.0,
        tol,
    )
}

/// `∫_{-∞}^b f`.
pub fn integrate_from_neg_infinity<F: Fn(f64) -> f64>(f: F, b: f64, scale: f64, tol: f64) -> Result<f64> {
    integrate_to_infinity(|x| f(2.0 * b - x), b, scale, tol)
}
