//! Euler–Maruyama integration of
//! `dλ_i = −(E + λ_i²)dτ + (J̃²/N)Σ_{j≠i} dτ/(λ_i − λ_j) + √(2J̃²/N) dB_i`
//! with blow-up at `−∞` and reinjection from `+∞`.
//!
//! A particle that passes `−Λ_cut` leaves the interacting set and is
//! carried through infinity by the free flow in the variable `u = −1/λ`,
//! where `du/dτ = −1 − E u²` is regular. It comes back once `λ = −1/u`
//! drops below `+Λ_cut`, so each blow-up costs the free-flight time
//! `≈ 2/Λ_cut` and the particle count never changes.

use rand::Rng;
use sdm_analytic::resolvent_constant;
use sdm_core::numerics::stats::Histogram;
use sdm_core::rng::gaussian;
use sdm_core::{Error, RandomStream, Result};
use serde::{Deserialize, Serialize};

use crate::config::{DbmConfig, Interaction, Start};

/// Largest `λ² h` in one Euler step; particles beyond it take local
/// substeps `h ∝ 1/λ²`.
const KAPPA: f64 = 0.05;
/// Maximum number of step halvings before giving up.
const MAX_HALVINGS: u32 = 30;
/// Fraction of the pair-repulsion stability limit used as step size.
const STIFFNESS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbmTrajectoryStats {
    pub n: usize,
    pub e: f64,
    pub tilde_j: f64,
    /// Blow-ups after burn-in.
    pub crossings: u64,
    /// Blow-ups during burn-in.
    pub burn_in_crossings: u64,
    /// Measured time after burn-in.
    pub time: f64,
    /// Crossings per particle per unit time.
    pub measured_current: f64,
    /// `∫ dτ (1/N)Σλ_i` over the measured time, with the sum truncated
    /// symmetrically to `|λ| ≤ Λ_cut`.
    pub trz_integral: f64,
    pub batch_trz: Vec<f64>,
    pub batch_crossings: Vec<u64>,
    pub batch_time: f64,
    pub histogram: Histogram,
    /// Time of the first blow-up, measured from the start of the run.
    pub first_crossing: Option<f64>,
    /// Number of steps that had to be halved to keep the order.
    pub halvings: u64,
    /// Neighbour swaps resolved by reflection.
    pub reflections: u64,
    /// Integration steps taken, stiffness-limited substeps included.
    pub substeps: u64,
}

impl DbmTrajectoryStats {
    /// Batch-means standard error of the current.
    pub fn current_stderr(&self) -> f64 {
        let per: Vec<f64> = self.batch_crossings.iter().map(|&k| k as f64 / (self.n as f64 * self.batch_time)).collect();
        sdm_core::numerics::stats::mean_stderr(&per).1
    }

    /// First and second half currents agree within two standard errors.
    pub fn is_stationary(&self) -> bool {
        let half = self.batch_crossings.len() / 2;
        if half == 0 {
            return true;
        }
        let rate = |ks: &[u64]| -> Vec<f64> { ks.iter().map(|&k| k as f64 / (self.n as f64 * self.batch_time)).collect() };
        let (m1, s1) = sdm_core::numerics::stats::mean_stderr(&rate(&self.batch_crossings[..half]));
        let (m2, s2) = sdm_core::numerics::stats::mean_stderr(&rate(&self.batch_crossings[half..]));
        (m1 - m2).abs() <= 2.0 * s1.hypot(s2) + 1e-300
    }
}

/// Particle state: the interacting set in increasing order and the
/// particles in flight through infinity, stored as `u = −1/λ`.
struct Ensemble {
    x: Vec<f64>,
    flight: Vec<f64>,
    force: Vec<f64>,
    trial: Vec<f64>,
}

struct Stepper<'a> {
    cfg: &'a DbmConfig,
    coupling: f64,
    sigma: f64,
    shift: f64,
    time: f64,
    halvings: u64,
    reflections: u64,
}

impl Stepper<'_> {
    fn drift(&self, lambda: f64) -> f64 {
        -(self.shift + lambda * lambda)
    }

    /// One Euler–Maruyama move of length `h` with Brownian increments `w`
    /// (already scaled by `σ`) into `trial`. Returns `false` if a particle
    /// jumped past more than one neighbour.
    fn propose(&self, ens: &mut Ensemble, h: f64, w: &[f64], common: f64) -> bool {
        compute_forces(&ens.x, &mut ens.force, self.cfg.interaction);
        let cut = self.cfg.cutoff;
        for i in 0..ens.x.len() {
            let l0 = ens.x[i];
            if l0 < -cut {
                ens.trial[i] = l0;
                continue;
            }
            let push = self.coupling * ens.force[i];
            let noise = w[i] + common;
            if l0 * l0 * h <= KAPPA {
                ens.trial[i] = l0 + (self.drift(l0) + push) * h + noise;
            } else {
                // Local substeps; the interaction is frozen and the noise
                // increment is spread uniformly in time.
                let mut l = l0;
                let mut done = 0.0;
                while done < h && l >= -cut {
                    let s = (KAPPA / (l * l)).min(h - done);
                    l += (self.drift(l) + push) * s + noise * (s / h);
                    done += s;
                }
                ens.trial[i] = l;
            }
        }
        let t = &ens.trial;
        (0..t.len().saturating_sub(2)).all(|k| t[k + 1] < -cut || t[k] < t[k + 2])
    }

    /// Advances by `h`. A swap of two neighbours is the discrete image of
    /// the pair reflecting off each other (their gap diffuses like a
    /// two-dimensional Bessel process, which comes arbitrarily close to
    /// zero) and is undone by sorting. A larger permutation halves the step
    /// with a Brownian bridge.
    fn advance<R: Rng>(&mut self, ens: &mut Ensemble, h: f64, w: &[f64], common: f64, rng: &mut R, depth: u32) -> Result<()> {
        if self.propose(ens, h, w, common) {
            let cut = self.cfg.cutoff;
            let t = &ens.trial;
            let swaps = (0..t.len().saturating_sub(1)).filter(|&k| t[k] >= -cut && !(t[k] < t[k + 1])).count();
            if swaps > 0 {
                self.reflections += swaps as u64;
                ens.trial.sort_by(f64::total_cmp);
            }
            std::mem::swap(&mut ens.x, &mut ens.trial);
            return Ok(());
        }
        if depth >= MAX_HALVINGS {
            let cut = self.cfg.cutoff;
            let t = &ens.trial;
            let k = (0..t.len() - 2).find(|&k| t[k + 1] >= -cut && !(t[k] < t[k + 2])).unwrap_or(0);
            return Err(Error::StepCollapse { time: self.time, left: k, right: k + 2 });
        }
        self.halvings += 1;
        let half = 0.5 * h;
        let spread = 0.5 * h.sqrt() * self.sigma;
        let w1: Vec<f64> = w.iter().map(|&wi| 0.5 * wi + spread * gaussian(rng)).collect();
        let w2: Vec<f64> = w.iter().zip(&w1).map(|(a, b)| a - b).collect();
        let c1 = 0.5 * common + 0.5 * h.sqrt() * self.common_sigma() * gaussian(rng);
        let c2 = common - c1;
        self.advance(ens, half, &w1, c1, rng, depth + 1)?;
        self.advance(ens, half, &w2, c2, rng, depth + 1)
    }

    /// `θ Δ_min² N/J̃²`: explicit steps on the pair repulsion are stable
    /// below `Δ²/g` for the closest pair.
    fn stable_step(&self, x: &[f64]) -> f64 {
        let cut = self.cfg.cutoff;
        let gap = x.windows(2).filter(|w| w[0] >= -cut).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        STIFFNESS * gap * gap / self.coupling
    }

    fn common_sigma(&self) -> f64 {
        (2.0 * self.cfg.c / self.cfg.n as f64).sqrt() * self.cfg.tilde_j
    }
}



pub fn compute_forces(x: &[f64], force: &mut [f64], kind: Interaction) {
    let n = x.len();
    match kind {
        Interaction::Direct => {
            for i in 0..n {
                let xi = x[i];
                let mut s = 0.0;
                for (j, &xj) in x.iter().enumerate() {
                    if j != i {
                        s += 1.0 / (xi - xj);
                    }
                }
                force[i] = s;
            }
        }
        Interaction::Pairwise => {
            force[..n].iter_mut().for_each(|f| *f = 0.0);
            for i in 0..n {
                let xi = x[i];
                let mut s = force[i];
                for j in i + 1..n {
                    let f = 1.0 / (xi - x[j]);
                    s += f;
                    force[j] -= f;
                }
                force[i] = s;
            }
        }
    }
}

/// Quantiles `(i + 1/2)/N` of the analytic confined droplet.
pub fn droplet_positions(n: usize, e: f64, beta: f64) -> Result<Vec<f64>> {
    let rc = resolvent_constant(e, beta);
    let (lo, hi) = rc.support().ok_or_else(|| Error::OutOfPhase(format!("no droplet at E = {e}")))?;
    let m = 4000;
    let h = (hi - lo) / m as f64;
    let mut cdf = vec![0.0; m + 1];
    let mut prev = rc.density(lo);
    for k in 1..=m {
        let cur = rc.density(lo + h * k as f64);
        cdf[k] = cdf[k - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    let total = cdf[m];
    Ok((0..n)
        .map(|i| {
            let target = (i as f64 + 0.5) / n as f64 * total;
            let k = cdf.partition_point(|&c| c < target).clamp(1, m);
            let frac = (target - cdf[k - 1]) / (cdf[k] - cdf[k - 1]).max(1e-300);
            lo + h * (k as f64 - 1.0 + frac)
        })
        .collect())
}

pub fn dbm_simulate(cfg: &DbmConfig, stream: RandomStream) -> Result<DbmTrajectoryStats> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = stream.rng();
    let cut = cfg.cutoff;
    let x = match cfg.start {
        Start::Infinity => (0..n).map(|i| cut * (i + 1) as f64 / n as f64).collect(),
        Start::Droplet => droplet_positions(n, cfg.e, cfg.beta())?,
    };
    let mut ens = Ensemble { x, flight: Vec::new(), force: vec![0.0; n], trial: vec![0.0; n] };
    let sigma = (2.0 * cfg.tilde_j * cfg.tilde_j / n as f64).sqrt();
    // Static part of the zero mode.
    let shift = cfg.e + if cfg.c > 0.0 { cfg.tilde_j * (cfg.c / n as f64).sqrt() * gaussian(&mut rng) } else { 0.0 };
    let mut st = Stepper { cfg, coupling: cfg.tilde_j * cfg.tilde_j / n as f64, sigma, shift, time: 0.0, halvings: 0, reflections: 0 };

    let dt = cfg.dt;
    let burn_steps = (cfg.burn_in / dt).round() as u64;
    let run_steps = ((cfg.total_time / dt).round() as u64).max(1);
    let batches = cfg.batches.min(run_steps as usize).max(1);
    let batch_steps = run_steps / batches as u64;
    let batches_used = (run_steps / batch_steps.max(1)).min(batches as u64) as usize;
    let hs = cfg.histogram;
    let mut stats = DbmTrajectoryStats {
        n,
        e: cfg.e,
        tilde_j: cfg.tilde_j,
        crossings: 0,
        burn_in_crossings: 0,
        time: 0.0,
        measured_current: 0.0,
        trz_integral: 0.0,
        batch_trz: vec![0.0; batches_used],
        batch_crossings: vec![0; batches_used],
        batch_time: batch_steps as f64 * dt,
        histogram: Histogram::new(hs.lo, hs.hi, hs.bins),
        first_crossing: None,
        halvings: 0,
        reflections: 0,
        substeps: 0,
    };
    let mut w = vec![0.0; n];
    let common_sigma = st.common_sigma();
    let total_steps = burn_steps + batch_steps * batches_used as u64;
    for step in 0..total_steps {
        // Substeps bounded by the stiffness of the closest pair.
        let mut elapsed = 0.0;
        while dt - elapsed > 1e-12 * dt {
            let active = ens.x.len();
            let h = st.stable_step(&ens.x).min(dt - elapsed);
            let sq = h.sqrt();
            for wi in w[..active].iter_mut() {
                *wi = sigma * sq * gaussian(&mut rng);
            }
            let common = if cfg.c > 0.0 { common_sigma * sq * gaussian(&mut rng) } else { 0.0 };
            ens.trial.resize(active, 0.0);
            ens.force.resize(active, 0.0);
            st.advance(&mut ens, h, &w[..active], common, &mut rng, 0)?;
            elapsed += h;
            stats.substeps += 1;
        }
        st.time = (step + 1) as f64 * dt;

        // Free flight through infinity.
        let mut reentered = Vec::new();
        ens.flight.retain_mut(|u| {
            *u -= dt * (1.0 + cfg.e * *u * *u);
            if *u <= -1.0 / cut {
                reentered.push(-1.0 / *u);
                false
            } else {
                true
            }
        });
        let exits = ens.x.partition_point(|&l| l < -cut);
        let measuring = step >= burn_steps;
        for l in ens.x.drain(..exits) {
            ens.flight.push(-1.0 / l);
        }
        if exits > 0 {
            if stats.first_crossing.is_none() {
                stats.first_crossing = Some(st.time);
            }
            if measuring {
                stats.crossings += exits as u64;
                let b = (((step - burn_steps) / batch_steps) as usize).min(batches_used - 1);
                stats.batch_crossings[b] += exits as u64;
            } else {
                stats.burn_in_crossings += exits as u64;
            }
            if cfg.stop_at_first_crossing {
                break;
            }
        }
        for l in reentered {
            let at = ens.x.partition_point(|&y| y < l);
            ens.x.insert(at, l);
        }

        if measuring {
            let b = (((step - burn_steps) / batch_steps) as usize).min(batches_used - 1);
            let s: f64 = ens.x.iter().filter(|l| l.abs() <= cut).sum::<f64>() / n as f64;
            stats.batch_trz[b] += s * dt;
            stats.trz_integral += s * dt;
            stats.time += dt;
            if (step - burn_steps) % cfg.sample_every as u64 == 0 {
                for &l in &ens.x {
                    stats.histogram.add(l, 1.0);
                }
                for &u in &ens.flight {
                    stats.histogram.add(-1.0 / u, 1.0);
                }
            }
        }
    }
    for b in stats.batch_trz.iter_mut() {
        *b /= stats.batch_time;
    }
    stats.measured_current = if stats.time > 0.0 { stats.crossings as f64 / (n as f64 * stats.time) } else { 0.0 };
    stats.halvings = st.halvings;
    stats.reflections = st.reflections;
    debug_assert_eq!(ens.x.len() + ens.flight.len(), n);
    Ok(stats)
}
