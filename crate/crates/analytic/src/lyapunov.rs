//! Generalized Lyapunov exponent of the `d = 1` continuum model.

use sdm_core::{Error, Result};

use crate::model::Model;
use crate::saddle::sigma_q;

/// `Λ(q, E) = Σ_q + q√μ` at `μ = −E`, for `E < 0`.
pub fn generalized_lyapunov(q: f64, e: f64, j: f64) -> Result<f64> {
    if !(e < 0.0) {
        return Err(Error::OutOfRange(format!("E = {e} must be negative")));
    }
    let mu = -e;
    Ok(sigma_q(q, &Model::continuum(mu, j))? + q * mu.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::d1;

    #[test]
    fn simple_phase_at_q_one() {
        let j = 1.0;
        let e = -2.0 * d1::larkin_mass(j);
        assert!((generalized_lyapunov(1.0, e, j).unwrap() - (-e).sqrt()).abs() < 1e-13);
        assert_eq!(generalized_lyapunov(0.0, e, j).unwrap(), 0.0);
        assert!(generalized_lyapunov(1.0, 0.5, j).is_err());
    }

    #[test]
    fn convex_in_q() {
        let (e, j) = (-0.3, 1.0);
        let l: Vec<f64> = [0.4, 0.5, 0.6].iter().map(|&q| generalized_lyapunov(q, e, j).unwrap()).collect();
        assert!(l[0] + l[2] - 2.0 * l[1] > -1e-10);
    }
}
