//! Log-domain averaging, batch-means errors, least squares and histograms.

use serde::{Deserialize, Serialize};

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln((1/n) Σ e^{x_i})`.
pub fn log_mean_exp(xs: &[f64]) -> f64 {
    log_sum_exp(xs) - (xs.len() as f64).ln()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    (mean(xs), (variance(xs) / xs.len() as f64).sqrt())
}

/// Applies `estimator` to the whole sample and to `batches` contiguous
/// batches; the error is the spread of the batch values over `√batches`.
pub fn batch_means<F: Fn(&[f64]) -> f64>(xs: &[f64], batches: usize, estimator: F) -> (f64, f64) {
    let value = estimator(xs);
    let b = batches.min(xs.len()).max(2);
    let size = xs.len() / b;
    if size == 0 {
        return (value, f64::NAN);
    }
    let vals: Vec<f64> = (0..b).map(|i| estimator(&xs[i * size..(i + 1) * size])).collect();
    (value, (variance(&vals) / b as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Least squares `y ≈ intercept + slope·x` with optional standard errors
/// `sigma` on `y`. Without `sigma` the residual scatter sets the errors.
pub fn linear_fit(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let w: Vec<f64> = match sigma {
        Some(s) => s.iter().map(|s| 1.0 / (s * s)).collect(),
        None => vec![1.0; x.len()],
    };
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let scale = match sigma {
        Some(_) => 1.0,
        None if x.len() > 2 => {
            let rss: f64 = x.iter().zip(y).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
            rss / (x.len() as f64 - 2.0)
        }
        None => f64::NAN,
    };
    LinearFit {
        slope,
        intercept,
        slope_se: (scale * sw / det).sqrt(),
        intercept_se: (scale * sxx / det).sqrt(),
    }
}

/// Fixed-width histogram that keeps out-of-range counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<f64>,
    pub underflow: f64,
    pub overflow: f64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Histogram { lo, hi, counts: vec![0.0; bins], underflow: 0.0, overflow: 0.0 }
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn add(&mut self, x: f64, weight: f64) {
        if x < self.lo {
            self.underflow += weight;
        } else if x >= self.hi {
            self.overflow += weight;
        } else {
            let i = ((x - self.lo) / self.width()) as usize;
            let i = i.min(self.counts.len() - 1);
            self.counts[i] += weight;
        }
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum::<f64>() + self.underflow + self.overflow
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.width();
        (0..self.counts.len()).map(|i| self.lo + (i as f64 + 0.5) * w).collect()
    }

    /// Density normalized by the total weight, out-of-range mass included.
    pub fn density(&self) -> Vec<f64> {
        let norm = self.total() * self.width();
        self.counts.iter().map(|c| c / norm).collect()
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
    }

    pub fn mean(&self) -> f64 {
        let c = self.centers();
        let inside: f64 = self.counts.iter().sum();
        c.iter().zip(&self.counts).map(|(x, n)| x * n).sum::<f64>() / inside
    }
}
