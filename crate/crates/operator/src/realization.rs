//! Disorder realizations `W(x) = J(H(x) + ξ(x) I)`.

use nalgebra::DMatrix;
use rand_distr::{ChiSquared, Distribution};
use sdm_core::numerics::linalg;
use sdm_core::{ModelParams, RandomStream, Result};

/// One draw of the disorder: a GOE block `H(x)` and a scalar `ξ(x)` per site.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorRealization {
    pub params: ModelParams,
    pub goe: Vec<DMatrix<f64>>,
    pub xi: Vec<f64>,
    pub stream: RandomStream,
}

/// GOE(N) with off-diagonal variance `1/N` and diagonal variance `2/N`,
/// filled row by row over the lower triangle.
pub fn sample_goe<I: Iterator<Item = f64>>(n: usize, g: &mut I) -> DMatrix<f64> {
    let off = (1.0 / n as f64).sqrt();
    let diag = (2.0 / n as f64).sqrt();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = off * g.next().expect("infinite stream");
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
        h[(i, i)] = diag * g.next().expect("infinite stream");
    }
    h
}

/// Deterministic in `(seed, stream_id)`: site by site, the GOE entries are
/// drawn first and `ξ(x)` last.
pub fn sample_operator(params: &ModelParams, stream: RandomStream) -> Result<OperatorRealization> {
    params.validate()?;
    let n = params.n;
    let xi_scale = (params.c / n as f64).sqrt();
    let mut g = stream.gaussians();
    let sites = params.sites();
    let mut goe = Vec::with_capacity(sites);
    let mut xi = Vec::with_capacity(sites);
    for _ in 0..sites {
        goe.push(sample_goe(n, &mut g));
        let z = g.next().expect("infinite stream");
        xi.push(if params.c == 0.0 { 0.0 } else { xi_scale * z });
    }
    Ok(OperatorRealization { params: *params, goe, xi, stream })
}

impl OperatorRealization {
    pub fn sites(&self) -> usize {
        self.goe.len()
    }

    /// `W(x) = J(H(x) + ξ(x) I)`.
    pub fn disorder(&self, x: usize) -> DMatrix<f64> {
        let j = self.params.j;
        let mut w = &self.goe[x] * j;
        for i in 0..self.params.n {
            w[(i, i)] += j * self.xi[x];
        }
        w
    }

    /// `shift·I + W(x)` where `shift` is the on-site part of `μ − E − tΔ`.
    /// All assembly routines go through here so that equal shifts give
    /// bit-identical blocks.
    pub fn onsite_block(&self, x: usize, shift: f64) -> DMatrix<f64> {
        let j = self.params.j;
        let n = self.params.n;
        let h = &self.goe[x];
        DMatrix::from_fn(n, n, |r, c| if r == c { shift + j * (h[(r, c)] + self.xi[x]) } else { j * h[(r, c)] })
    }

    /// Diagonal of `−tΔ`: `2t` per axis, except a periodic axis of length 1
    /// where the two neighbours are the site itself.
    pub fn laplacian_diagonal(&self) -> f64 {
        laplacian_diagonal(&self.params)
    }

    /// Same realization with the ξ and H signs flipped.
    pub fn negated(&self) -> OperatorRealization {
        OperatorRealization {
            goe: self.goe.iter().map(|h| -h).collect(),
            xi: self.xi.iter().map(|x| -x).collect(),
            ..self.clone()
        }
    }
}

pub fn laplacian_diagonal(p: &ModelParams) -> f64 {
    use sdm_core::Boundary;
    let per_axis = if p.boundary == Boundary::Periodic && p.l == 1 { 0.0 } else { 2.0 * p.t };
    per_axis * p.d as f64
}

/// Eigenvalues of one GOE(N) draw via the tridiagonal model: diagonal
/// `N(0, 2/N)` and off-diagonal `χ_{N−k}/√N`, `k = 1..N−1`. Returns them in
/// ascending order.
pub fn goe_eigenvalues_tridiagonal<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let s = (1.0 / n as f64).sqrt();
    let mut diag: Vec<f64> = (0..n).map(|_| s * 2f64.sqrt() * sdm_core::rng::gaussian(rng)).collect();
    let mut off: Vec<f64> = (1..n)
        .map(|k| {
            let chi2 = ChiSquared::new((n - k) as f64).expect("positive degrees of freedom");
            s * chi2.sample(rng).sqrt()
        })
        .collect();
    linalg::tridiagonal_eigenvalues(&mut diag, &mut off)?;
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sdm_core::Boundary;

    fn params(n: usize, c: f64) -> ModelParams {
        ModelParams { d: 0, n, l: 1, c, ..Default::default() }
    }

    #[test]
    fn zero_trace_noise_gives_zero_xi() {
        let r = sample_operator(&ModelParams { c: 0.0, ..Default::default() }, RandomStream::new(1, 2)).unwrap();
        assert!(r.xi.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn reproducible_and_symmetric() {
        let p = ModelParams { d: 1, n: 5, l: 6, boundary: Boundary::Dirichlet, ..Default::default() };
        let a = sample_operator(&p, RandomStream::new(9, 4)).unwrap();
        let b = sample_operator(&p, RandomStream::new(9, 4)).unwrap();
        assert_eq!(a, b);
        let c = sample_operator(&p, RandomStream::new(9, 5)).unwrap();
        assert_ne!(a, c);
        for h in &a.goe {
            assert_eq!(h, &h.transpose());
        }
    }

    #[test]
    fn scalar_disorder_variance() {
        // N = 1: W = J(H + ξ) has variance J²(2 + c)/N.
        let (j, c) = (1.3, 0.7);
        let p = ModelParams { j, ..params(1, c) };
        let draws = 100_000;
        let w: Vec<f64> =
            (0..draws).map(|i| sample_operator(&p, RandomStream::new(3, i)).unwrap().disorder(0)[(0, 0)]).collect();
        let mean = w.iter().sum::<f64>() / draws as f64;
        let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0);
        let want = j * j * (2.0 + c);
        // The sample variance of a Gaussian has relative s.e. √(2/n).
        assert!((var - want).abs() < 3.0 * want * (2.0 / draws as f64).sqrt(), "{var} vs {want}");
    }

    #[test]
    fn goe_entry_variances() {
        let n = 6;
        let samples = 20_000;
        let mut g = RandomStream::new(5, 0).gaussians();
        let (mut off2, mut diag2) = (0.0, 0.0);
        for _ in 0..samples {
            let h = sample_goe(n, &mut g);
            off2 += h[(3, 1)] * h[(3, 1)];
            diag2 += h[(2, 2)] * h[(2, 2)];
        }
        let (off2, diag2) = (off2 / samples as f64, diag2 / samples as f64);
        let se = (2.0 / samples as f64).sqrt();
        assert!((off2 * n as f64 - 1.0).abs() < 3.0 * se);
        assert!((diag2 * n as f64 / 2.0 - 1.0).abs() < 3.0 * se);
    }

    #[test]
    fn tridiagonal_model_matches_dense_moments() {
        // (1/N) E Tr H² = (N + 1)/N; the fourth moment is compared with dense draws.
        let n = 8;
        let samples = 20_000;
        let mut rng = RandomStream::new(2, 0).rng();
        let mut g = RandomStream::new(2, 1).gaussians();
        let (mut t2, mut t4, mut d2, mut d4) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..samples {
            let ev = goe_eigenvalues_tridiagonal(n, &mut rng).unwrap();
            assert!(ev.windows(2).all(|w| w[0] <= w[1]));
            t2 += ev.iter().map(|x| x * x).sum::<f64>();
            t4 += ev.iter().map(|x| x.powi(4)).sum::<f64>();
            let h = sample_goe(n, &mut g);
            let h2 = &h * &h;
            d2 += h2.trace();
            d4 += (&h2 * &h2).trace();
        }
        let norm = (samples * n) as f64;
        let (t2, t4, d2, d4) = (t2 / norm, t4 / norm, d2 / norm, d4 / norm);
        assert!((t2 - (n as f64 + 1.0) / n as f64).abs() < 0.01);
        assert!((t2 - d2).abs() < 0.02);
        assert!((t4 - d4).abs() < 0.06 * d4, "{t4} vs {d4}");
    }
}
