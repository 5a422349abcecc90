//! First-passage ensembles for escape over the confinement barrier.

use rayon::prelude::*;
use sdm_core::numerics::stats::linear_fit;
use sdm_core::{Error, RandomStream, Result};
use serde::{Deserialize, Serialize};

use crate::config::{DbmConfig, Start};
use crate::simulate::dbm_simulate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassageSample {
    /// First blow-up time, or the time budget if `censored`.
    pub time: f64,
    pub censored: bool,
}

/// Independent trajectories started from the analytic droplet, each run
/// until the first blow-up or until `max_time` elapses (a censored
/// sample). Trial `i` uses `stream.child(i)`.
pub fn first_passage_ensemble(cfg: &DbmConfig, trials: usize, max_time: f64, stream: RandomStream) -> Result<Vec<PassageSample>> {
    let mut run = cfg.clone();
    run.start = Start::Droplet;
    run.burn_in = 0.0;
    run.total_time = max_time;
    run.stop_at_first_crossing = true;
    run.batches = 1;
    run.sample_every = usize::MAX;
    run.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let stats = dbm_simulate(&run, stream.child(i as u64))?;
            Ok(match stats.first_crossing {
                Some(t) => PassageSample { time: t, censored: false },
                None => PassageSample { time: max_time, censored: true },
            })
        })
        .collect()
}

/// Sample median; censored samples count as `+∞`. Fails with `Timeout`
/// when at least half the samples are censored.
pub fn median_passage(samples: &[PassageSample]) -> Result<f64> {
    let mut t: Vec<f64> = samples.iter().map(|s| if s.censored { f64::INFINITY } else { s.time }).collect();
    t.sort_by(f64::total_cmp);
    let n = t.len();
    if n == 0 {
        return Err(Error::InvalidParams("no passage samples".into()));
    }
    let m = if n % 2 == 1 { t[n / 2] } else { 0.5 * (t[n / 2 - 1] + t[n / 2]) };
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Timeout(samples.iter().map(|s| s.time).fold(0.0, f64::max)))
    }
}

/// Slope of `ln(median passage time)` against `N`, with its standard error.
pub fn arrhenius_slope(ns: &[usize], medians: &[f64]) -> (f64, f64) {
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let fit = linear_fit(&x, &y, None);
    (fit.slope, fit.slope_se)
}
