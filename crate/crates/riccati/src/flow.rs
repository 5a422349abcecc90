//! Two-step solution matrices of `−tψ_{x−1} + A_x ψ_x − tψ_{x+1} = 0`
//! with `Ψ_0 = 0`, `Ψ_1 = I`. On a Dirichlet chain of `M` sites
//! `det(𝓗 − E) = t^{NM} det Ψ_{M+1}`, and `M_x = tΨ_{x+1}Ψ_x⁻¹` are the
//! block-LU pivots.

use nalgebra::DMatrix;
use sdm_core::numerics::linalg;
use sdm_core::{Boundary, Error, Result};
use sdm_operator::{LogDetMethod, LogDetResult, OperatorRealization};

/// Relative size of the smallest `R` pivot below which `Ψ_x` counts as
/// singular.
const DEGENERATE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    /// `Ψ_x G` for the accumulated right factor `G`.
    pub psi: DMatrix<f64>,
    /// `Ψ_{x−1} G`.
    pub psi_prev: DMatrix<f64>,
    /// `ln|det G⁻¹|`, so that `ln|det Ψ_x| = accumulated_log + ln|det psi|`.
    pub accumulated_log: f64,
    /// Sign of `det G⁻¹`.
    pub sign: f64,
    /// Negative eigenvalues of the pivots `M_1..M_x` seen so far.
    pub explosion_count: usize,
    pub position: usize,
}

impl FlowState {
    pub fn start(n: usize) -> Self {
        FlowState {
            psi: DMatrix::identity(n, n),
            psi_prev: DMatrix::zeros(n, n),
            accumulated_log: 0.0,
            sign: 1.0,
            explosion_count: 0,
            position: 1,
        }
    }

    /// Advances by one site with diagonal block `a` and hopping `t`, then
    /// re-orthonormalizes by a QR factorization of the new `Ψ`. The pivot
    /// `M_x` is congruent to `Ψ_xᵀΨ_{x+1}`, so its negative count does not
    /// depend on the right factor.
    pub fn step(&mut self, a: &DMatrix<f64>, t: f64) -> Result<()> {
        let next = (a * &self.psi - &self.psi_prev * t) / t;
        let mut wronskian = self.psi.transpose() * &next;
        symmetrize(&mut wronskian);
        let inertia = linalg::symmetric_inertia(&wronskian)?;
        if inertia.zero > 0 {
            return Err(Error::Degenerate(self.position));
        }
        self.explosion_count += inertia.negative;
        let qr = next.qr();
        let r = qr.r();
        let diag: Vec<f64> = r.diagonal().iter().copied().collect();
        let largest = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if diag.iter().any(|d| d.abs() <= DEGENERATE * largest) || largest == 0.0 {
            return Err(Error::Degenerate(self.position + 1));
        }
        for d in &diag {
            self.accumulated_log += d.abs().ln();
            self.sign *= d.signum();
        }
        // Ψ_x R⁻¹ from Rᵀ X = Ψ_xᵀ.
        let x = r.transpose().solve_lower_triangular(&self.psi.transpose()).ok_or(Error::Degenerate(self.position))?;
        self.psi_prev = x.transpose();
        self.psi = qr.q();
        self.position += 1;
        Ok(())
    }

    /// `ln|det Ψ_x|` and its sign.
    pub fn log_det(&self) -> (f64, f64) {
        let (q_log, q_sign) = log_abs_det_general(&self.psi);
        (self.accumulated_log + q_log, self.sign * q_sign)
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

fn log_abs_det_general(m: &DMatrix<f64>) -> (f64, f64) {
    let lu = m.clone().lu();
    let d = lu.determinant();
    (d.abs().ln(), d.signum())
}

/// Output of a full flow along a Dirichlet chain.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub log_abs_det: f64,
    pub sign: f64,
    pub explosion_count: usize,
    /// `ln|det Ψ_{M+1}|`.
    pub log_psi: f64,
}

fn flow_once(real: &OperatorRealization, e: f64) -> Result<FlowResult> {
    let p = &real.params;
    if p.d != 1 || p.boundary != Boundary::Dirichlet {
        return Err(Error::InvalidParams("the transfer-matrix flow needs d = 1 with Dirichlet ends".into()));
    }
    let shift = (p.mu - e) + real.laplacian_diagonal();
    let mut state = FlowState::start(p.n);
    for x in 0..real.sites() {
        state.step(&real.onsite_block(x, shift), p.t)?;
    }
    let (log_psi, sign) = state.log_det();
    let nm = (p.n * real.sites()) as f64;
    Ok(FlowResult { log_abs_det: nm * p.t.ln() + log_psi, sign, explosion_count: state.explosion_count, log_psi })
}

/// Full flow; on an exactly degenerate step the flow is repeated once at
/// `E + 1e−12`.
pub fn riccati_flow(real: &OperatorRealization, e: f64) -> Result<FlowResult> {
    match flow_once(real, e) {
        Err(Error::Degenerate(x)) => {
            log::warn!("degenerate flow at site {x}; retrying at E + {:e}", sdm_operator::logdet::SINGULAR_SHIFT);
            flow_once(real, e + sdm_operator::logdet::SINGULAR_SHIFT)
        }
        other => other,
    }
}

/// `ln|det(𝓗 − E)|` from the flow; `sign_flips` is the node count.
pub fn riccati_logdet(real: &OperatorRealization, e: f64) -> Result<LogDetResult> {
    let r = riccati_flow(real, e)?;
    Ok(LogDetResult { log_abs_det: r.log_abs_det, sign_flips: r.explosion_count, method: "riccati".into() })
}

pub struct Riccati;

impl LogDetMethod for Riccati {
    fn logdet(&self, real: &OperatorRealization, e: f64) -> Result<LogDetResult> {
        riccati_logdet(real, e)
    }
}

/// The operator-crate methods plus `riccati`.
pub fn logdet_registry() -> sdm_core::Registry<dyn LogDetMethod> {
    sdm_operator::logdet_registry().with("riccati", Box::new(Riccati))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sdm_core::{ModelParams, RandomStream};
    use sdm_operator::{assemble_dense, logdet_block_recursion, sample_operator};

    fn chain(n: usize, l: usize, s: u64) -> OperatorRealization {
        let p = ModelParams { d: 1, n, l, t: 0.8, j: 1.1, c: 0.4, mu: 0.2, e: 0.0, boundary: Boundary::Dirichlet };
        sample_operator(&p, RandomStream::new(17, s)).unwrap()
    }

    #[test]
    fn scalar_free_chain() {
        let (t, mu, m) = (1.3, 0.25, 9);
        let p = ModelParams { d: 1, n: 1, l: m, t, j: 1e-300, c: 0.0, mu, e: 0.0, boundary: Boundary::Dirichlet };
        let real = sample_operator(&p, RandomStream::new(0, 0)).unwrap();
        // det tridiag(−t, a, −t) = t^M sinh((M+1)κ)/sinh κ with cosh κ = a/(2t).
        let kappa = ((mu + 2.0 * t) / (2.0 * t)).acosh();
        let want = m as f64 * t.ln() + (((m + 1) as f64 * kappa).sinh() / kappa.sinh()).ln();
        let r = riccati_logdet(&real, 0.0).unwrap();
        assert!((r.log_abs_det - want).abs() < 1e-12);
        assert_eq!(r.sign_flips, 0);
    }

    #[test]
    fn agrees_with_block_recursion() {
        for s in 0..30 {
            let real = chain(1 + s as usize % 6, 2 + s as usize % 20, s);
            let a = riccati_logdet(&real, 0.3).unwrap();
            let b = logdet_block_recursion(&real, 0.3).unwrap();
            assert!((a.log_abs_det - b.log_abs_det).abs() < 1e-8, "s={s}");
            assert_eq!(a.sign_flips, b.sign_flips);
        }
    }

    #[test]
    fn node_count_is_spectral_count() {
        let real = chain(4, 12, 99);
        let ev = assemble_dense(&real, 0.0).unwrap().symmetric_eigenvalues();
        let mut last = 0;
        for k in 0..40 {
            let e = -4.0 + 0.25 * k as f64;
            let r = riccati_flow(&real, e).unwrap();
            assert_eq!(r.explosion_count, ev.iter().filter(|&&x| x < e).count());
            assert!(r.explosion_count >= last);
            last = r.explosion_count;
        }
    }

    #[test]
    fn long_chain_does_not_overflow() {
        let real = chain(3, 3000, 5);
        let r = riccati_flow(&real, -2.0).unwrap();
        assert!(r.log_abs_det.is_finite() && r.log_abs_det > 100.0);
        let b = logdet_block_recursion(&real, -2.0).unwrap();
        assert!((r.log_abs_det - b.log_abs_det).abs() < 1e-8 * b.log_abs_det.abs());
    }

    #[test]
    fn registry_has_three_methods() {
        assert_eq!(logdet_registry().names(), vec!["dense", "block", "riccati"]);
        let p = ModelParams { d: 1, boundary: Boundary::Periodic, ..Default::default() };
        let real = sample_operator(&p, RandomStream::new(0, 0)).unwrap();
        assert!(matches!(riccati_logdet(&real, 0.0), Err(Error::InvalidParams(_))));
    }
}
