//! Closed forms for a single site (`d = 0`), where `ρ_K` is a semicircle
//! of radius `2J`.

use sdm_core::{Error, Result, SaddlePhase};

use crate::saddle::SaddleSolution;

/// `f(ξ) = ∫dα ρ_K(α) ln|α + Jξ|`, both branches.
pub fn f(xi: f64, j: f64) -> f64 {
    let a = xi.abs();
    if a <= 2.0 {
        j.ln() + 0.25 * xi * xi - 0.5
    } else {
        let r = (xi * xi - 4.0).sqrt();
        j.ln() + 0.25 * (xi * xi - 2.0 - a * r + 4.0 * (a + r).ln()) - 2f64.ln()
    }
}

/// `f'(ξ)`.
pub fn f_prime(xi: f64) -> f64 {
    if xi.abs() <= 2.0 {
        0.5 * xi
    } else {
        0.5 * (xi - xi.signum() * (xi * xi - 4.0).sqrt())
    }
}

pub fn mu_b(q: f64, j: f64) -> f64 {
    (2.0 - q) * j
}

pub fn saddle(q: f64, mu: f64, j: f64) -> SaddleSolution {
    let (xi, y, mu_q, phase) = if mu >= mu_b(q, j) || q >= 2.0 {
        // X = ξ/(qJ), finite at q = 0.
        let x = 2.0 / (mu + (mu * mu + 4.0 * j * j * (q - 1.0)).max(0.0).sqrt());
        (q * j * x, 0.0, mu + (q - 1.0) * j * j * x, SaddlePhase::Simple)
    } else {
        let mu_q = mu / (2.0 - q);
        let y2 = (1.0 - mu_q * mu_q / (j * j)) / (j * j);
        (q * mu_q / j, y2.max(0.0).sqrt(), mu_q, SaddlePhase::Complex)
    };
    let e = f(xi + mu / j, j) - mu.ln();
    SaddleSolution { q, xi_star: xi, y, mu_q, phase, sigma_q: -0.5 * xi * xi + q * e, e }
}

pub fn sigma_q(q: f64, mu: f64, j: f64) -> f64 {
    saddle(q, mu, j).sigma_q
}

/// Complex-phase formula `qμ²/(2(2−q)J²) + q ln(J/μ) − q/2`.
pub fn sigma_q_complex(q: f64, mu: f64, j: f64) -> f64 {
    q * mu * mu / (2.0 * (2.0 - q) * j * j) + q * (j / mu).ln() - 0.5 * q
}

pub fn e_typ(mu: f64, j: f64) -> f64 {
    if mu < 2.0 * j {
        -0.5 + mu * mu / (4.0 * j * j) + (j / mu).ln()
    } else {
        let x = mu / j;
        -0.5 + 0.25 * x * x - 0.25 * x * (x * x - 4.0).sqrt() + (0.5 * (1.0 + (1.0 - 4.0 / (x * x)).sqrt())).ln()
    }
}

pub fn var_e(mu: f64, j: f64) -> f64 {
    if mu < 2.0 * j {
        mu * mu / (4.0 * j * j)
    } else {
        (mu * mu - mu * (mu * mu - 4.0 * j * j).sqrt() - 2.0 * j * j) / (2.0 * j * j)
    }
}

/// Upper end `1/2 + ln(J/μ)` of the range where the complex-phase
/// rate function applies.
pub fn e_c(mu: f64, j: f64) -> f64 {
    0.5 + (j / mu).ln()
}

/// `φ(x) = 1 + 2x − √(1 + 4x)`.
pub fn phi_scaling(x: f64) -> f64 {
    1.0 + 2.0 * x - (1.0 + 4.0 * x).sqrt()
}

/// Rate function and conjugate `q` for `e < e_c`, from the scaling form.
pub fn rate_complex(e: f64, mu: f64, j: f64) -> Result<(f64, f64)> {
    if e >= e_c(mu, j) {
        return Err(Error::OutOfRange(format!("e = {e} is above e_c")));
    }
    let w = e + 0.5 - (j / mu).ln();
    if w <= 0.0 {
        return Err(Error::OutOfRange(format!("e = {e} below the attainable range")));
    }
    let q = 2.0 - mu / (j * w.sqrt());
    if q <= -1.0 {
        return Err(Error::OutOfRange(format!("e = {e} maps to q = {q} ≤ −1")));
    }
    let x = j * j * (e - e_typ(mu, j)) / (mu * mu);
    Ok((mu * mu / (j * j) * phi_scaling(x), q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_is_c1_with_singular_curvature_at_two() {
        let j = 1.0;
        let h = 1e-7;
        assert!((f(2.0 - h, j) - f(2.0 + h, j)).abs() < 1e-6);
        assert!((f_prime(2.0 - h) - f_prime(2.0 + h)).abs() < 1e-3);
        let d2_in = (f_prime(2.0 - 1e-4) - f_prime(2.0 - 2e-4)) / 1e-4;
        let d2_out = (f_prime(2.0 + 2e-4) - f_prime(2.0 + 1e-4)) / 1e-4;
        assert!((d2_in - 0.5).abs() < 1e-6);
        assert!(d2_out < -10.0);
        // f' is the derivative of f.
        for &x in &[-3.0, -1.0, 0.4, 2.5, 5.0] {
            let d = (f(x + 1e-6, j) - f(x - 1e-6, j)) / 2e-6;
            assert!((d - f_prime(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn sigma_values() {
        assert!((sigma_q(1.0, 0.5, 1.0) - 0.318147).abs() < 1e-6);
        for &mu in &[0.3, 0.5, 1.0] {
            for &q in &[0.2, 0.5, 1.0, 1.5] {
                if mu < mu_b(q, 1.0) {
                    assert!((sigma_q(q, mu, 1.0) - sigma_q_complex(q, mu, 1.0)).abs() < 1e-13);
                }
            }
        }
        for &mu in &[1.5, 2.5, 3.0, 5.0] {
            assert!(sigma_q(1.0, mu, 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn continuity_at_boundary() {
        for &q in &[0.3, 0.8, 1.2, 1.7] {
            let mb = mu_b(q, 1.0);
            let lo = saddle(q, mb * (1.0 - 1e-9), 1.0);
            let hi = saddle(q, mb * (1.0 + 1e-9), 1.0);
            assert!((lo.sigma_q - hi.sigma_q).abs() < 1e-7);
            assert!((lo.xi_star - hi.xi_star).abs() < 1e-4);
            assert!(lo.y < 1e-3);
            let at = -0.5 * q * (q + 2.0 * (2.0 - q).ln() - 1.0);
            assert!((hi.sigma_q - at).abs() < 1e-7);
        }
    }

    #[test]
    fn near_one_expansion() {
        // Σ_q ≈ (q − 1)J²/(2μ²).
        for &(mu, j) in &[(3.0, 1.0), (2.0, 0.7)] {
            let h = 1e-5;
            let slope = (sigma_q(1.0 + h, mu, j) - sigma_q(1.0 - h, mu, j)) / (2.0 * h);
            assert!((slope - j * j / (2.0 * mu * mu)).abs() < 1e-8, "{slope}");
        }
    }

    #[test]
    fn variance_limits() {
        assert!((var_e(2.0, 1.0) - 1.0).abs() < 1e-14);
        let mu: f64 = 1e3;
        assert!((var_e(mu, 1.0) - 1.0 / (mu * mu)).abs() < 10.0 / mu.powi(4));
        assert!((phi_scaling(2.0) - 2.0).abs() < 1e-15);
        // e_typ is continuous at μ = 2J.
        assert!((e_typ(2.0 - 1e-12, 1.0) - e_typ(2.0 + 1e-12, 1.0)).abs() < 1e-6);
    }

    #[test]
    fn flat_action_at_q_two() {
        // S(ξ) = ξ²/2 − 2 f(ξ) is constant for |ξ| < 2 when μ = 0.
        let s: Vec<f64> = (0..101).map(|i| -1.99 + 0.0398 * i as f64).map(|x| 0.5 * x * x - 2.0 * f(x, 1.0)).collect();
        let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi - lo < 1e-12);
    }
}
