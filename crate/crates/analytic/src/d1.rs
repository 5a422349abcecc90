//! Closed and semi-closed forms for the `d = 1` continuum with `t = 1`,
//! where `∫_k 1/(z + k²) = 1/(2√z)`.

use sdm_core::numerics::quad::integrate;
use sdm_core::numerics::roots::brent;
use sdm_core::{Error, Result, SaddlePhase};

use crate::dos::dos_continuum_d1;
use crate::saddle::SaddleSolution;

/// `μ_c = (J/2)^{4/3}`.
pub fn larkin_mass(j: f64) -> f64 {
    (0.5 * j).powf(4.0 / 3.0)
}

/// `μ_b = (3 − 2q) μ_c`.
pub fn mu_b(q: f64, j: f64) -> f64 {
    (3.0 - 2.0 * q) * larkin_mass(j)
}

/// Largest root of `μ_q − (J²/2)(q − 1) μ_q^{−1/2} = μ`.
pub fn mu_q(q: f64, mu: f64, j: f64) -> Result<f64> {
    // u = √μ_q solves u³ − μu − c = 0.
    let c = 0.5 * j * j * (q - 1.0);
    let mut u = largest_real_root(-mu, -c);
    if !(u > 0.0) {
        return Err(Error::NoRealRoot(format!("no positive μ_q for q = {q}, μ = {mu}")));
    }
    // Newton polish, kept only while it helps (it stalls at a double root).
    let poly = |u: f64| u * u * u - mu * u - c;
    for _ in 0..3 {
        let next = u - poly(u) / (3.0 * u * u - mu);
        if !(poly(next).abs() < poly(u).abs()) {
            break;
        }
        u = next;
    }
    Ok(u * u)
}

/// Largest real root of `u³ + p u + r = 0`.
fn largest_real_root(p: f64, r: f64) -> f64 {
    let disc = 4.0 * p * p * p + 27.0 * r * r;
    // Near a double root the trigonometric form still picks the largest.
    if p < 0.0 && disc <= 1e-12 * 4.0 * (p * p * p).abs() {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * r / (p * m)).clamp(-1.0, 1.0);
        m * (arg.acos() / 3.0).cos()
    } else {
        let d = (0.25 * r * r + p * p * p / 27.0).sqrt();
        (-0.5 * r + d).cbrt() + (-0.5 * r - d).cbrt()
    }
}

fn check_simple(q: f64, mu: f64, j: f64) -> Result<()> {
    if mu < 0.0 {
        return Err(Error::OutOfRange(format!("μ = {mu} < 0")));
    }
    // Absolute slack for the point μ = μ_b itself.
    if mu < mu_b(q, j) - 1e-13 * (1.0 + mu.abs()) {
        return Err(Error::OutOfPhase(format!("μ = {mu} is below μ_b = {}", mu_b(q, j))));
    }
    Ok(())
}

pub fn saddle_simple(q: f64, mu: f64, j: f64) -> Result<SaddleSolution> {
    check_simple(q, mu, j)?;
    let mq = mu_q(q, mu, j)?;
    let e = mq.sqrt() - mu.sqrt() + j * j / (8.0 * mq);
    let sigma_q = q * (mq.sqrt() - mu.sqrt() - j * j * (q - 1.0) / (8.0 * mq));
    Ok(SaddleSolution { q, xi_star: j * q / (2.0 * mq.sqrt()), y: 0.0, mu_q: mq, phase: SaddlePhase::Simple, sigma_q, e })
}

pub fn sigma_q_simple(q: f64, mu: f64, j: f64) -> Result<f64> {
    Ok(saddle_simple(q, mu, j)?.sigma_q)
}

/// `Σ_q` at `μ = μ_b`.
pub fn transition_value(q: f64, j: f64) -> f64 {
    q * (1.0 - (3.0 - 2.0 * q).sqrt() - 0.5 * (q - 1.0)) * (0.5 * j).powf(2.0 / 3.0)
}

/// Complex-phase point written as `μ_q + iJ²y = ρ e^{iθ}`. The `y`
/// equation fixes `ρ(θ) = (J²/(4 cos(θ/2)))^{2/3}`.
#[derive(Debug, Clone, Copy)]
struct Polar {
    rho: f64,
    theta: f64,
}

impl Polar {
    fn new(theta: f64, j: f64) -> Self {
        Polar { rho: (j * j / (4.0 * (0.5 * theta).cos())).powf(2.0 / 3.0), theta }
    }

    /// `Re ∫_k 1/(z + k²)`.
    fn re_i(&self) -> f64 {
        (0.5 * self.theta).cos() / (2.0 * self.rho.sqrt())
    }

    fn mass(&self, q: f64, j: f64) -> f64 {
        self.rho * self.theta.cos() - (q - 1.0) * j * j * self.re_i()
    }
}

/// Solves the complex-phase equations at mass `mu`, taking the root
/// continuously connected to `θ = 0` at `μ_b`.
fn complex_point(q: f64, mu: f64, j: f64) -> Result<Polar> {
    let f = |th: f64| Polar::new(th, j).mass(q, j) - mu;
    let n = 400;
    let top = std::f64::consts::PI * (1.0 - 1e-9);
    let mut prev = (0.0, f(0.0));
    if prev.1 == 0.0 {
        return Ok(Polar::new(0.0, j));
    }
    for i in 1..=n {
        let th = top * i as f64 / n as f64;
        let v = f(th);
        if v.signum() != prev.1.signum() {
            let root = brent(f, prev.0, th, 1e-15)?;
            return Ok(Polar::new(root, j));
        }
        prev = (th, v);
    }
    Err(Error::NoRoot(format!("no complex-phase solution for q = {q}, μ = {mu}")))
}

/// `ξ*_q` in the complex phase.
pub fn xi_complex(q: f64, mu: f64, j: f64) -> Result<f64> {
    Ok(q * j * complex_point(q, mu, j)?.re_i())
}

/// `Σ_q` for `0 < μ < μ_b`, integrating `∂_μΣ_q = ξ*_q/J − q/(2√μ)`
/// down from the transition value at `μ_b`. Restricted to `0 ≤ q < 3/2`,
/// where the transition is continuous and `μ_b > 0`.
pub fn saddle_complex(q: f64, mu: f64, j: f64, tol: f64) -> Result<SaddleSolution> {
    if !(0.0..1.5).contains(&q) {
        return Err(Error::OutOfRange(format!("complex-phase anchoring needs 0 ≤ q < 3/2, got {q}")));
    }
    let mb = mu_b(q, j);
    if !(mu > 0.0 && mu < mb) {
        return Err(Error::OutOfPhase(format!("μ = {mu} not in (0, μ_b = {mb})")));
    }
    let p = complex_point(q, mu, j)?;
    let xi = q * j * p.re_i();
    let sigma_q = if q == 0.0 {
        0.0
    } else {
        // The −q/(2√m) part is integrated exactly.
        let dxi = |m: f64| xi_complex(q, m, j).map(|x| x / j).unwrap_or(f64::NAN);
        let part = integrate(dxi, mu, mb, tol)?;
        transition_value(q, j) - part + q * (mb.sqrt() - mu.sqrt())
    };
    let e = if q == 0.0 { f64::NAN } else { (sigma_q + 0.5 * xi * xi) / q };
    let y = p.rho * p.theta.sin() / (j * j);
    Ok(SaddleSolution { q, xi_star: xi, y, mu_q: p.rho * p.theta.cos(), phase: SaddlePhase::Complex, sigma_q, e })
}

pub fn sigma_q_complex(q: f64, mu: f64, j: f64, tol: f64) -> Result<f64> {
    Ok(saddle_complex(q, mu, j, tol)?.sigma_q)
}

/// `𝖾_typ` from the `q = 0` simple-phase saddle (`μ ≥ 3μ_c`).
pub fn e_typ_closed(mu: f64, j: f64) -> Result<f64> {
    Ok(saddle_simple(0.0, mu, j)?.e)
}

/// `𝖾_typ = ∫dα (ρ_K(α) − ρ_0(α)) ln|α + μ|` with `ρ_0 = θ(α)/(2π√α)`.
pub fn e_typ_dos_integral(mu: f64, j: f64, tol: f64) -> Result<f64> {
    let edge = -3.0 * larkin_mass(j);
    let lg = |a: f64| (a + mu).abs().ln();
    let inner = |a: f64| dos_continuum_d1(a, j) * lg(a);
    let below = if -mu > edge && -mu < 0.0 {
        integrate(inner, edge, -mu, tol)? + integrate(inner, -mu, 0.0, tol)?
    } else {
        integrate(inner, edge, 0.0, tol)?
    };
    // Substituting α = u² removes the 1/√α of the free density. The
    // difference decays like α^{−7/2} ln α, so a cutoff at Λ = 10⁵ leaves
    // a remainder far below any tolerance used here.
    let diff = |u: f64| {
        let a = u * u;
        2.0 * u * dos_continuum_d1(a, j) * lg(a) - lg(a) / std::f64::consts::PI
    };
    let top = (1e5 * 3.0 * larkin_mass(j)).sqrt();
    let above = if mu < 0.0 && (-mu).sqrt() < top {
        let r = (-mu).sqrt();
        integrate(diff, 0.0, r, tol)? + integrate(diff, r, top, tol)?
    } else {
        integrate(diff, 0.0, top, tol)?
    };
    Ok(below + above)
}

/// Upper end of the simple-phase `𝖾` range: `(3/2)(J/2)^{2/3} − √μ`.
pub fn e_c(mu: f64, j: f64) -> f64 {
    1.5 * (0.5 * j).powf(2.0 / 3.0) - mu.sqrt()
}

/// Limit of `𝖾_typ` as `μ → 3μ_c` from above, as `(3/2 − √3)(J/2)^p`
/// for `p = 2/3` (consistent with the simple-phase formulas) and the
/// alternative `p = 4/3`.
pub fn e_typ_edge_limit(j: f64) -> (f64, f64) {
    let k = 1.5 - 3f64.sqrt();
    (k * (0.5 * j).powf(2.0 / 3.0), k * (0.5 * j).powf(4.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn larkin_and_boundary_values() {
        assert!((larkin_mass(2.0) - 1.0).abs() < 1e-15);
        assert!((mu_b(0.0, 1.3) - 3.0 * larkin_mass(1.3)).abs() < 1e-15);
        assert!((mu_b(1.0, 1.3) - larkin_mass(1.3)).abs() < 1e-15);
    }

    #[test]
    fn cubic_root_matches_generic_solver() {
        for &(p, r) in &[(-3.0, 1.0), (-1.0, -0.2), (2.0, 1.0), (-0.5, 0.9), (-4.0, 0.0)] {
            let want = roots::find_roots_cubic(1.0, 0.0, p, r).as_ref().iter().copied().fold(f64::NAN, f64::max);
            assert!((largest_real_root(p, r) - want).abs() < 1e-9, "p={p} r={r}");
        }
    }

    #[test]
    fn mu_q_roots() {
        for &mu in &[0.5, 1.0, 4.0] {
            assert!((mu_q(1.0, mu, 1.0).unwrap() - mu).abs() < 1e-14);
            assert!(sigma_q_simple(1.0, mu, 1.0).unwrap().abs() < 1e-14);
        }
        let j = 1.7;
        let target = 2f64.powf(2.0 / 3.0) * larkin_mass(j);
        assert!((mu_q(2.0, 0.0, j).unwrap() - target).abs() < 1e-12);
        // μ_q = μ_c at μ = μ_b; a double root at q = 0, hence √ε accuracy.
        for &q in &[0.0, 0.2, 0.9, 1.3] {
            let tol = if q == 0.0 { 1e-7 } else { 1e-10 };
            assert!((mu_q(q, mu_b(q, j), j).unwrap() - larkin_mass(j)).abs() < tol);
        }
        assert!(matches!(mu_q(0.0, 0.5 * mu_b(0.0, j), j), Err(Error::NoRealRoot(_))));
        assert!(matches!(saddle_simple(0.5, 0.5 * mu_b(0.5, j), j), Err(Error::OutOfPhase(_))));
    }

    #[test]
    fn simple_phase_derivatives() {
        let (q, mu, j) = (0.6, 3.0, 1.1);
        let h = 1e-5;
        let s = |q: f64, mu: f64| sigma_q_simple(q, mu, j).unwrap();
        let sol = saddle_simple(q, mu, j).unwrap();
        let dmu = (s(q, mu + h) - s(q, mu - h)) / (2.0 * h);
        assert!((dmu - (sol.xi_star / j - q / (2.0 * mu.sqrt()))).abs() < 1e-8);
        let dq = (s(q + h, mu) - s(q - h, mu)) / (2.0 * h);
        assert!((dq - sol.e).abs() < 1e-8);
        // Φ = J²q²/(8μ_q) = ξ²/2.
        assert!((sol.q * sol.e - sol.sigma_q - j * j * q * q / (8.0 * sol.mu_q)).abs() < 1e-13);
    }

    #[test]
    fn complex_phase_is_continuous_at_boundary() {
        let j = 1.0;
        for &q in &[0.3, 0.7, 1.2] {
            let mb = mu_b(q, j);
            let lo = saddle_complex(q, mb * (1.0 - 1e-10), j, 1e-12).unwrap();
            assert!((lo.sigma_q - transition_value(q, j)).abs() < 1e-8);
            assert!((lo.mu_q - larkin_mass(j)).abs() < 1e-4);
            assert!(lo.y < 1e-4);
            let hi = saddle_simple(q, mb, j).unwrap();
            assert!((hi.sigma_q - transition_value(q, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_phase_vanishes_at_q_zero() {
        let j = 1.0;
        let mu = 0.6 * mu_b(0.0, j);
        assert_eq!(sigma_q_complex(0.0, mu, j, 1e-10).unwrap(), 0.0);
        // One-sided Richardson estimate of ∂_qΣ at q = 0.
        let h = 1e-3;
        let d = (4.0 * sigma_q_complex(h, mu, j, 1e-12).unwrap() - sigma_q_complex(2.0 * h, mu, j, 1e-12).unwrap()) / (2.0 * h);
        let e0 = crate::rate::e_typ(&crate::Model::continuum(mu, j)).unwrap();
        assert!((d - e0).abs() < 1e-6, "{d} vs {e0}");
    }

    #[test]
    fn e_typ_two_routes() {
        for &(mu, j) in &[(1.5, 1.0), (3.0, 1.0), (2.6, 1.6)] {
            let a = e_typ_closed(mu, j).unwrap();
            let b = e_typ_dos_integral(mu, j, 1e-11).unwrap();
            assert!((a - b).abs() < 1e-7, "μ={mu}: {a} vs {b}");
        }
        let j = 1.4;
        let (p23, _) = e_typ_edge_limit(j);
        assert!((e_typ_closed(mu_b(0.0, j), j).unwrap() - p23).abs() < 1e-7);
        assert!((e_c(mu_b(0.0, j), j) - p23).abs() < 1e-12);
    }

    #[test]
    fn i1_i2_identity_at_zero() {
        // I₂(0) = 1/2 corresponds to Re I at θ = 0 scaled by √μ_c.
        let p = Polar::new(0.0, 2.0);
        assert!((p.re_i() * p.rho.sqrt() - 0.5).abs() < 1e-15);
    }
}
