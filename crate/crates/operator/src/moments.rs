//! Monte Carlo estimates of the reduced moments `Ỹ_q ∼ e^{N L^d Σ_q}` and
//! of the distribution of `𝖾 = (ln|det(𝓗 − E)| − ln|det 𝓗⁰|)/(N L^d)`.

use rayon::prelude::*;
use sdm_core::numerics::stats::{self, Histogram, LinearFit};
use sdm_core::{Error, ModelParams, RandomStream, Registry, Result};
use serde::{Deserialize, Serialize};

use crate::assemble::free_logdet;
use crate::logdet::logdet_auto;
use crate::realization::{goe_eigenvalues_tridiagonal, sample_operator};

/// Per-realization output of a sampler: `𝖾_i` and, for each `q`, a log
/// weight `ℓ_i(q)` such that `Σ̂_q = ln(mean_i e^{ℓ_i(q)})/(N L^d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSample {
    pub e: f64,
    pub log_weights: Vec<f64>,
}

pub trait MomentSampler: Send + Sync {
    fn sample(&self, p: &ModelParams, qs: &[f64], stream: RandomStream) -> Result<MomentSample>;
}

/// Full disorder draw, `ℓ_i(q) = q N L^d 𝖾_i`.
pub struct Direct;

impl MomentSampler for Direct {
    fn sample(&self, p: &ModelParams, qs: &[f64], stream: RandomStream) -> Result<MomentSample> {
        let real = sample_operator(p, stream)?;
        let ld = logdet_auto(&real, p.e)?.log_abs_det - free_logdet(p, p.e);
        let volume = p.dim() as f64;
        Ok(MomentSample { e: ld / volume, log_weights: qs.iter().map(|&q| if q == 0.0 { 0.0 } else { q * ld }).collect() })
    }
}

/// `d = 0` only: the GOE spectrum is drawn from the tridiagonal model and
/// the scalar `ξ` is integrated out on a fine grid, which removes the
/// dominant source of variance of `e^{qN𝖾}`. `𝖾_i` uses one drawn `ξ`.
pub struct ZeroMode {
    /// Grid step in units of `1/N`.
    pub step: f64,
}

impl Default for ZeroMode {
    fn default() -> Self {
        ZeroMode { step: 0.5 }
    }
}

/// `Σ_a ln|x_a|` with one logarithm per group of 16 factors.
fn sum_ln_abs(xs: impl Iterator<Item = f64>) -> f64 {
    let mut total = 0.0;
    let mut prod = 1.0;
    for (k, x) in xs.enumerate() {
        prod *= x.abs();
        if k % 16 == 15 {
            total += prod.ln();
            prod = 1.0;
        }
    }
    total + prod.ln()
}

/// Log-domain trapezoid rule on a uniform grid.
fn log_trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let mut v: Vec<f64> = values.to_vec();
    v[0] += 0.5f64.ln();
    v[n - 1] += 0.5f64.ln();
    stats::log_sum_exp(&v) + h.ln()
}

/// Log-weight drop below the maximum beyond which the integrand is ignored.
const LOG_CUT: f64 = 40.0;

impl MomentSampler for ZeroMode {
    fn sample(&self, p: &ModelParams, qs: &[f64], stream: RandomStream) -> Result<MomentSample> {
        if p.d != 0 {
            return Err(Error::InvalidParams("the zero-mode sampler needs d = 0".into()));
        }
        if !(p.c > 0.0) {
            return Err(Error::InvalidParams("the zero-mode sampler needs c > 0".into()));
        }
        if qs.iter().any(|&q| q < 0.0) {
            return Err(Error::InvalidParams("the zero-mode sampler needs q ≥ 0".into()));
        }
        let n = p.n as f64;
        let mass = p.mu - p.e;
        let mut rng = stream.rng();
        let lambda = goe_eigenvalues_tridiagonal(p.n, &mut rng)?;
        let xi_draw = (p.c / n).sqrt() * sdm_core::rng::gaussian(&mut rng);
        let free = n * mass.abs().ln();
        // ln|det| − ln|det 𝓗⁰| at ξ.
        let log_ratio = |xi: f64| sum_ln_abs(lambda.iter().map(|l| mass + p.j * (l + xi))) - free;
        let e = log_ratio(xi_draw) / n;

        let gauss = |xi: f64| -0.5 * n * xi * xi / p.c - 0.5 * (2.0 * std::f64::consts::PI * p.c / n).ln();
        let q_max = qs.iter().copied().fold(0.0, f64::max);
        let reach = lambda.iter().map(|l| (mass / p.j + l).abs()).fold(0.0, f64::max) + 4.0 * p.c.sqrt() * (1.0 + q_max);
        let coarse_h = 0.05f64.min(reach / 200.0);
        let coarse_n = (2.0 * reach / coarse_h).ceil() as usize + 1;
        let coarse: Vec<(f64, f64)> = (0..coarse_n)
            .map(|i| {
                let xi = -reach + i as f64 * coarse_h;
                (xi, log_ratio(xi))
            })
            .collect();
        // Union of the regions that matter for any q.
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &q in qs.iter().filter(|&&q| q != 0.0) {
            let s: Vec<f64> = coarse.iter().map(|&(xi, lr)| gauss(xi) + q * lr).collect();
            let top = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (k, &v) in s.iter().enumerate() {
                if v >= top - LOG_CUT {
                    lo = lo.min(coarse[k].0 - 2.0 * coarse_h);
                    hi = hi.max(coarse[k].0 + 2.0 * coarse_h);
                }
            }
        }
        let mut log_weights = vec![0.0; qs.len()];
        if lo < hi {
            let h = self.step / n;
            let pts = ((hi - lo) / h).ceil() as usize + 1;
            let fine: Vec<(f64, f64)> = (0..pts)
                .map(|i| {
                    let xi = lo + i as f64 * h;
                    (gauss(xi), log_ratio(xi))
                })
                .collect();
            for (w, &q) in log_weights.iter_mut().zip(qs) {
                if q != 0.0 {
                    let vals: Vec<f64> = fine.iter().map(|&(g, lr)| g + q * lr).collect();
                    *w = log_trapezoid(&vals, h);
                }
            }
        }
        Ok(MomentSample { e, log_weights })
    }
}

/// `direct` and `zero-mode`.
pub fn moment_sampler_registry() -> Registry<dyn MomentSampler> {
    Registry::<dyn MomentSampler>::new().with("direct", Box::new(Direct)).with("zero-mode", Box::new(ZeroMode::default()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub q: f64,
    pub samples: usize,
    /// `ln(mean_i e^{ℓ_i(q)})`.
    pub log_mean: f64,
    pub sigma_hat: f64,
    /// Batch-means standard error of `sigma_hat`.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRun {
    pub params: ModelParams,
    pub estimates: Vec<MomentEstimate>,
    pub e_samples: Vec<f64>,
    pub e_mean: f64,
    pub e_stderr: f64,
    pub e_histogram: Histogram,
}

/// Default number of batches for batch-means errors.
pub const BATCHES: usize = 32;

/// Runs `samples` independent draws, sample `i` on `stream.child(i)`,
/// in parallel; results are merged in sample order, so they do not depend
/// on the number of worker threads.
pub fn moment_mc(
    p: &ModelParams,
    qs: &[f64],
    samples: usize,
    stream: RandomStream,
    sampler: &dyn MomentSampler,
) -> Result<MomentRun> {
    p.validate()?;
    if samples < 2 {
        return Err(Error::InvalidParams("moment_mc needs at least 2 samples".into()));
    }
    if qs.is_empty() {
        return Err(Error::InvalidParams("empty q list".into()));
    }
    if let Some(q) = qs.iter().find(|&&q| !(q > -1.0)) {
        return Err(Error::InvalidParams(format!("q = {q} must be > −1")));
    }
    let draws: Vec<MomentSample> = (0..samples as u64)
        .into_par_iter()
        .map(|i| sampler.sample(p, qs, stream.child(i)))
        .collect::<Result<_>>()?;
    let volume = p.dim() as f64;
    let estimates = qs
        .iter()
        .enumerate()
        .map(|(k, &q)| {
            let lw: Vec<f64> = draws.iter().map(|d| d.log_weights[k]).collect();
            let (log_mean, err) = stats::batch_means(&lw, BATCHES, stats::log_mean_exp);
            MomentEstimate { q, samples, log_mean, sigma_hat: log_mean / volume, stderr: err / volume }
        })
        .collect();
    let e_samples: Vec<f64> = draws.iter().map(|d| d.e).collect();
    let (e_mean, e_stderr) = stats::mean_stderr(&e_samples);
    let lo = e_samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = e_samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut e_histogram = Histogram::new(lo, hi + 1e-12 * (1.0 + hi.abs()), 50);
    for &e in &e_samples {
        e_histogram.add(e, 1.0);
    }
    Ok(MomentRun { params: *p, estimates, e_samples, e_mean, e_stderr, e_histogram })
}

/// Linear fit of `value` against `1/N`; the intercept is the `N → ∞`
/// extrapolation.
pub fn extrapolate_inverse_n(ns: &[usize], values: &[f64], stderrs: &[f64]) -> LinearFit {
    let x: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    let usable = stderrs.iter().all(|s| s.is_finite() && *s > 0.0);
    stats::linear_fit(&x, values, if usable { Some(stderrs) } else { None })
}
