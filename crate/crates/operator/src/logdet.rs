//! Exact `ln|det(𝓗 − E)|` with the count of negative eigenvalues, by
//! interchangeable methods.

use nalgebra::DMatrix;
use sdm_core::numerics::linalg;
use sdm_core::{Boundary, Error, Registry, Result};
use serde::{Deserialize, Serialize};

use crate::assemble::{assemble_dense_guarded, DENSE_GUARD};
use crate::realization::OperatorRealization;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogDetResult {
    pub log_abs_det: f64,
    /// Number of negative eigenvalues of `𝓗 − E`.
    pub sign_flips: usize,
    pub method: String,
}

/// E-shift used when a factorization meets an exactly singular pivot.
pub const SINGULAR_SHIFT: f64 = 1e-12;

pub trait LogDetMethod: Send + Sync {
    fn logdet(&self, real: &OperatorRealization, e: f64) -> Result<LogDetResult>;
}

/// Pivoted symmetric factorization of a square symmetric matrix.
pub fn logdet_dense(m: &DMatrix<f64>) -> Result<LogDetResult> {
    let inertia = linalg::symmetric_logdet(m)?;
    Ok(LogDetResult { log_abs_det: inertia.log_abs_det, sign_flips: inertia.negative, method: "dense".into() })
}

pub struct Dense {
    pub guard: usize,
}

impl Default for Dense {
    fn default() -> Self {
        Dense { guard: DENSE_GUARD }
    }
}

impl LogDetMethod for Dense {
    fn logdet(&self, real: &OperatorRealization, e: f64) -> Result<LogDetResult> {
        logdet_dense(&assemble_dense_guarded(real, e, self.guard)?)
    }
}

pub struct BlockRecursion;

impl LogDetMethod for BlockRecursion {
    fn logdet(&self, real: &OperatorRealization, e: f64) -> Result<LogDetResult> {
        logdet_block_recursion(real, e)
    }
}

/// Accumulates `ln|det|` and negative counts of Schur complements
/// (Sylvester's law of inertia).
#[derive(Default)]
struct Tally {
    log_abs_det: f64,
    negative: usize,
}

impl Tally {
    fn add(&mut self, m: &DMatrix<f64>, site: usize) -> Result<()> {
        let inertia = linalg::symmetric_inertia(m)?;
        if inertia.zero > 0 {
            return Err(Error::BlockSingular(site));
        }
        self.log_abs_det += inertia.log_abs_det;
        self.negative += inertia.negative;
        Ok(())
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn inverse(m: DMatrix<f64>, site: usize) -> Result<DMatrix<f64>> {
    let mut inv = m.try_inverse().ok_or(Error::BlockSingular(site))?;
    symmetrize(&mut inv);
    Ok(inv)
}

/// Block-LU recursion for `d = 1`, cost `O(M N³)`. Dirichlet chains use
/// `M_x = A_x − t² M_{x−1}⁻¹`; periodic rings eliminate sites `1..M−1`
/// first and close on site 0 through the accumulated border. On an exactly
/// singular block the evaluation is repeated once at `E + 1e−12`.
pub fn logdet_block_recursion(real: &OperatorRealization, e: f64) -> Result<LogDetResult> {
    match block_recursion_once(real, e) {
        Err(Error::BlockSingular(site)) => {
            log::warn!("singular block at site {site}; retrying at E + {SINGULAR_SHIFT:e}");
            block_recursion_once(real, e + SINGULAR_SHIFT)
        }
        other => other,
    }
}

fn block_recursion_once(real: &OperatorRealization, e: f64) -> Result<LogDetResult> {
    let p = &real.params;
    if p.d != 1 {
        return Err(Error::InvalidParams(format!("block recursion needs d = 1 (d = {})", p.d)));
    }
    let shift = (p.mu - e) + real.laplacian_diagonal();
    let t2 = p.t * p.t;
    let m = real.sites();
    let mut tally = Tally::default();
    match p.boundary {
        Boundary::Dirichlet => {
            let mut prev_inv: Option<DMatrix<f64>> = None;
            for x in 0..m {
                let mut s = real.onsite_block(x, shift);
                if let Some(inv) = &prev_inv {
                    s -= inv * t2;
                }
                tally.add(&s, x)?;
                if x + 1 < m {
                    prev_inv = Some(inverse(s, x)?);
                }
            }
        }
        Boundary::Periodic => {
            let n = p.n;
            let mut d0 = real.onsite_block(0, shift);
            let mut prev: Option<(DMatrix<f64>, DMatrix<f64>)> = None;
            for x in 1..m {
                // Coupling of site x to site 0 before elimination.
                let mut c = DMatrix::zeros(n, n);
                if x == 1 {
                    c -= DMatrix::identity(n, n) * p.t;
                }
                if x == m - 1 {
                    c -= DMatrix::identity(n, n) * p.t;
                }
                let mut s = real.onsite_block(x, shift);
                if let Some((inv, c_prev)) = &prev {
                    s -= inv * t2;
                    c += inv * c_prev * p.t;
                }
                tally.add(&s, x)?;
                let inv = inverse(s, x)?;
                d0 -= c.transpose() * &inv * &c;
                prev = Some((inv, c));
            }
            symmetrize(&mut d0);
            tally.add(&d0, 0)?;
        }
    }
    Ok(LogDetResult { log_abs_det: tally.log_abs_det, sign_flips: tally.negative, method: "block".into() })
}

/// `dense` and `block`; further methods can be registered by other crates.
pub fn logdet_registry() -> Registry<dyn LogDetMethod> {
    Registry::<dyn LogDetMethod>::new().with("dense", Box::new(Dense::default())).with("block", Box::new(BlockRecursion))
}

/// Block recursion in `d = 1`, dense factorization otherwise.
pub fn logdet_auto(real: &OperatorRealization, e: f64) -> Result<LogDetResult> {
    if real.params.d == 1 {
        logdet_block_recursion(real, e)
    } else {
        Dense::default().logdet(real, e)
    }
}
