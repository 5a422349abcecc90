//! Lyapunov sums of the transfer matrix and Monte Carlo generalized
//! Lyapunov exponents.

use nalgebra::DMatrix;
use rayon::prelude::*;
use sdm_core::numerics::stats;
use sdm_core::{Boundary, ContinuumParams, Error, ModelParams, RandomStream, Result};
use sdm_operator::realization::{sample_goe, sample_operator};
use serde::{Deserialize, Serialize};

use crate::flow::riccati_flow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpectrumResult {
    /// `Σ_{i≤n} γ_i` per site for `n = 1..N`.
    pub partial_sums: Vec<f64>,
    /// Individual exponents per site, largest first.
    pub exponents: Vec<f64>,
    pub chain_length: usize,
    /// Steps between re-orthonormalizations.
    pub interval: usize,
}

impl LyapunovSpectrumResult {
    /// `Σ_j γ_j / N`.
    pub fn mean_exponent(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0) / self.exponents.len() as f64
    }
}

/// Propagates an `N`-dimensional frame of `(ψ_x, ψ_{x−1})` over a chain
/// of `chain_length` sites with fresh disorder drawn site by site from
/// `stream`, re-orthonormalizing every `interval` steps.
pub fn lyapunov_sums(p: &ModelParams, e: f64, chain_length: usize, stream: RandomStream, interval: usize) -> Result<LyapunovSpectrumResult> {
    p.validate()?;
    if p.d != 1 {
        return Err(Error::InvalidParams("Lyapunov sums need d = 1".into()));
    }
    if interval == 0 || chain_length == 0 {
        return Err(Error::InvalidParams("interval and chain length must be ≥ 1".into()));
    }
    let n = p.n;
    let shift = (p.mu - e) + 2.0 * p.t;
    let xi_scale = (p.c / n as f64).sqrt();
    let mut g = stream.gaussians();
    let mut frame = DMatrix::zeros(2 * n, n);
    frame.view_mut((0, 0), (n, n)).fill_with_identity();
    let mut acc = vec![0.0; n];
    let absorb = |frame: &mut DMatrix<f64>, acc: &mut Vec<f64>| {
        let qr = frame.clone().qr();
        for (a, r) in acc.iter_mut().zip(qr.r().diagonal().iter()) {
            *a += r.abs().ln();
        }
        *frame = qr.q();
    };
    for x in 0..chain_length {
        let h = sample_goe(n, &mut g);
        let xi = xi_scale * g.next().expect("infinite stream");
        let mut a = h * p.j;
        for i in 0..n {
            a[(i, i)] += shift + p.j * xi;
        }
        let top = frame.rows(0, n).into_owned();
        let bottom = frame.rows(n, n).into_owned();
        let next = (&a * &top - &bottom * p.t) / p.t;
        frame.rows_mut(0, n).copy_from(&next);
        frame.rows_mut(n, n).copy_from(&top);
        if (x + 1) % interval == 0 || x + 1 == chain_length {
            absorb(&mut frame, &mut acc);
        }
    }
    let len = chain_length as f64;
    let mut exponents: Vec<f64> = acc.iter().map(|a| a / len).collect();
    exponents.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let partial_sums = exponents
        .iter()
        .scan(0.0, |s, g| {
            *s += g;
            Some(*s)
        })
        .collect();
    Ok(LyapunovSpectrumResult { partial_sums, exponents, chain_length, interval })
}

/// Free decay rate `acosh(1 + (μ − E)/(2t))` of each channel at `J = 0`.
pub fn free_rate(mass: f64, t: f64) -> f64 {
    (1.0 + mass / (2.0 * t)).acosh()
}

/// `∫dk/2π ln(m + 2t − 2t cos k) = ln t + acosh(1 + m/(2t))`, the
/// infinite-chain free normalization per channel and site.
pub fn free_log_integral(mass: f64, t: f64) -> f64 {
    t.ln() + free_rate(mass, t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GleEstimate {
    pub q: f64,
    pub samples: usize,
    /// `(1/(N ℓ)) ln mean |det Ψ|^q` with `ℓ` the chain length in the
    /// chosen units.
    pub lambda_per_channel: f64,
    pub stderr: f64,
    pub length: f64,
}

/// `ln|det Ψ_{M+1}|` for independent Dirichlet chains, chain `i` on
/// `stream.child(i)`.
pub fn log_psi_samples(p: &ModelParams, e: f64, samples: usize, stream: RandomStream) -> Result<Vec<f64>> {
    if p.d != 1 || p.boundary != Boundary::Dirichlet {
        return Err(Error::InvalidParams("chains need d = 1 with Dirichlet ends".into()));
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let real = sample_operator(p, stream.child(i))?;
            riccati_flow(&real, e).map(|r| r.log_psi)
        })
        .collect()
}

fn gle_from_logs(q: f64, logs: &[f64], norm: f64, length: f64) -> GleEstimate {
    let w: Vec<f64> = logs.iter().map(|l| if q == 0.0 { 0.0 } else { q * l }).collect();
    let (v, se) = stats::batch_means(&w, sdm_operator::moments::BATCHES, stats::log_mean_exp);
    GleEstimate { q, samples: logs.len(), lambda_per_channel: v / norm, stderr: se / norm, length }
}

/// Lattice generalized Lyapunov exponent per channel and site,
/// `(1/(N M)) ln mean |det Ψ_{M+1}|^q`.
pub fn gle_mc(p: &ModelParams, q: f64, e: f64, samples: usize, stream: RandomStream) -> Result<GleEstimate> {
    check_q(q, samples)?;
    let logs = log_psi_samples(p, e, samples, stream)?;
    let m = p.sites() as f64;
    Ok(gle_from_logs(q, &logs, p.n as f64 * m, m))
}

/// Continuum generalized Lyapunov exponent per channel and unit length from
/// the lattice at spacing `a`. The continuum solution with `Ψ(0) = 0`,
/// `Ψ'(0) = I` is `a Ψ_x` at `τ = x a`.
pub fn gle_continuum(cont: &ContinuumParams, a: f64, n: usize, q: f64, samples: usize, stream: RandomStream) -> Result<GleEstimate> {
    check_q(q, samples)?;
    let (lat, _) = cont.to_lattice(a, n)?;
    let lat = ModelParams { boundary: Boundary::Dirichlet, ..lat };
    let shift = n as f64 * a.ln();
    let logs: Vec<f64> = log_psi_samples(&lat, lat.e, samples, stream)?.into_iter().map(|l| l + shift).collect();
    let length = lat.l as f64 * a;
    Ok(gle_from_logs(q, &logs, n as f64 * length, length))
}

fn check_q(q: f64, samples: usize) -> Result<()> {
    if !(q > -1.0) {
        return Err(Error::InvalidParams(format!("q = {q} must be > −1")));
    }
    if samples < 2 {
        return Err(Error::InvalidParams("at least 2 samples are needed".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, j: f64) -> ModelParams {
        ModelParams { d: 1, n, l: 8, t: 1.0, j, c: 1.0, mu: 0.6, e: 0.0, boundary: Boundary::Dirichlet }
    }

    #[test]
    fn weak_disorder_gives_free_rates() {
        let p = params(3, 1e-8);
        let r = lyapunov_sums(&p, -0.2, 20_000, RandomStream::new(1, 0), 10).unwrap();
        let want = free_rate(0.8, 1.0);
        for g in &r.exponents {
            assert!((g - want).abs() < 1e-3, "{g} vs {want}");
        }
    }

    #[test]
    fn exponents_are_ordered_and_interval_invariant() {
        let p = params(4, 1.0);
        let a = lyapunov_sums(&p, 0.0, 20_000, RandomStream::new(2, 0), 10).unwrap();
        assert!(a.exponents.windows(2).all(|w| w[0] >= w[1]));
        let b = lyapunov_sums(&p, 0.0, 20_000, RandomStream::new(2, 0), 5).unwrap();
        for (x, y) in a.partial_sums.iter().zip(&b.partial_sums) {
            assert!((x - y).abs() < 1e-6 * x.abs().max(1e-3));
        }
    }

    #[test]
    fn gle_normalization() {
        let p = ModelParams { l: 6, ..params(2, 1.0) };
        let r = gle_mc(&p, 0.0, 0.0, 16, RandomStream::new(3, 0)).unwrap();
        assert_eq!(r.lambda_per_channel, 0.0);
        assert!(gle_mc(&p, -1.0, 0.0, 16, RandomStream::new(3, 0)).is_err());
    }

    #[test]
    fn free_log_integral_matches_quadrature() {
        let (m, t) = (0.7, 1.4);
        let k = 20_000;
        let s: f64 = (0..k).map(|i| (m + 2.0 * t - 2.0 * t * (2.0 * std::f64::consts::PI * i as f64 / k as f64).cos()).ln()).sum::<f64>() / k as f64;
        assert!((s - free_log_integral(m, t)).abs() < 1e-12);
    }
}
