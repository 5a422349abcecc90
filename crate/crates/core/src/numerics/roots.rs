//! Bracketed scalar root finding.

use roots::{find_root_brent, Convergency};

use crate::error::{Error, Result};

/// Mixed absolute/relative stopping rule for Brent's method.
struct Tolerance {
    xtol: f64,
    max_iter: usize,
}

impl Convergency<f64> for Tolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.xtol * (1.0 + x1.abs().max(x2.abs()))
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

/// Root of `f` in `[a, b]`, which must bracket a sign change.
pub fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!("[{a}, {b}] does not bracket a root (f = {fa:.3e}, {fb:.3e})")));
    }
    let mut conv = Tolerance { xtol, max_iter: 500 };
    find_root_brent(a, b, &f, &mut conv).map_err(|e| Error::NonConvergence {
        context: format!("brent on [{a}, {b}]: {e}"),
        iterations: 500,
        residual: f64::NAN,
    })
}

/// Plain bisection, for functions that are only piecewise continuous or
/// where a guaranteed bracket matters more than speed.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return Err(Error::NoRoot(format!("[{a}, {b}] does not bracket a root")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol * (1.0 + m.abs()) {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Expands `[a, b]` geometrically away from `a` until `f` changes sign.
pub fn expand_bracket<F: Fn(f64) -> f64>(f: &F, a: f64, mut b: f64, max_steps: usize) -> Result<(f64, f64)> {
    let fa = f(a);
    let mut lo = a;
    for _ in 0..max_steps {
        let fb = f(b);
        if fb.signum() != fa.signum() || fb == 0.0 {
            return Ok((lo, b));
        }
        lo = b;
        b = a + 2.0 * (b - a);
    }
    Err(Error::NoRoot(format!("no sign change found from {a}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-15).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        let (lo, hi) = expand_bracket(&|x: f64| x - 100.0, 0.0, 1.0, 20).unwrap();
        assert!(lo <= 100.0 && hi >= 100.0);
    }
}
