//! Symmetric factorizations backed by LAPACK.

// Pulls in the BLAS/LAPACK link line.
extern crate openblas_src;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Result of a symmetric indefinite factorization `P A Pᵀ = L D Lᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inertia {
    pub log_abs_det: f64,
    /// Number of negative eigenvalues (Sylvester's law applied to `D`).
    pub negative: usize,
    /// Number of zero pivots.
    pub zero: usize,
}

const SINGULAR_PIVOT: f64 = 1e-300;

/// Bunch–Kaufman factorization of a symmetric matrix; only the lower
/// triangle of `a` is read. Returns `log|det|` and the inertia of `D`.
pub fn symmetric_inertia(a: &DMatrix<f64>) -> Result<Inertia> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    if n == 0 {
        return Ok(Inertia { log_abs_det: 0.0, negative: 0, zero: 0 });
    }
    let mut work_a: Vec<f64> = a.as_slice().to_vec();
    let mut ipiv = vec![0i32; n];
    let mut info = 0;
    let mut query = [0.0f64];
    let ni = n as i32;
    unsafe {
        lapack::dsytrf(b'L', ni, &mut work_a, ni, &mut ipiv, &mut query, -1, &mut info);
    }
    let lwork = (query[0] as usize).max(1);
    let mut work = vec![0.0; lwork];
    unsafe {
        lapack::dsytrf(b'L', ni, &mut work_a, ni, &mut ipiv, &mut work, lwork as i32, &mut info);
    }
    if info < 0 {
        panic!("dsytrf rejected argument {}", -info);
    }
    let at = |i: usize, j: usize| work_a[i + j * n];
    let mut out = Inertia { log_abs_det: 0.0, negative: 0, zero: 0 };
    let mut k = 0;
    while k < n {
        if ipiv[k] > 0 {
            let d = at(k, k);
            if d.abs() < SINGULAR_PIVOT {
                out.zero += 1;
                out.log_abs_det = f64::NEG_INFINITY;
            } else {
                out.log_abs_det += d.abs().ln();
                if d < 0.0 {
                    out.negative += 1;
                }
            }
            k += 1;
        } else {
            let (p, q, r) = (at(k, k), at(k + 1, k), at(k + 1, k + 1));
            let det = p * r - q * q;
            let tr = p + r;
            if det.abs() < SINGULAR_PIVOT {
                out.zero += 1;
                out.log_abs_det = f64::NEG_INFINITY;
                if tr < 0.0 {
                    out.negative += 1;
                }
            } else {
                out.log_abs_det += det.abs().ln();
                out.negative += if det < 0.0 {
                    1
                } else if tr < 0.0 {
                    2
                } else {
                    0
                };
            }
            k += 2;
        }
    }
    Ok(out)
}

/// Like [`symmetric_inertia`] but fails on a singular pivot.
pub fn symmetric_logdet(a: &DMatrix<f64>) -> Result<Inertia> {
    let inertia = symmetric_inertia(a)?;
    if inertia.zero > 0 {
        return Err(Error::ExactSingularity(0));
    }
    Ok(inertia)
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off`.
pub fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    assert!(off.len() + 1 >= n, "off-diagonal too short");
    let mut info = 0;
    unsafe {
        lapack::dsterf(n as i32, diag, off, &mut info);
    }
    if info != 0 {
        return Err(Error::NonConvergence {
            context: "tridiagonal eigenvalues".into(),
            iterations: 30 * n,
            residual: f64::NAN,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn cofactor_det(a: &DMatrix<f64>) -> f64 {
        let n = a.nrows();
        if n == 1 {
            return a[(0, 0)];
        }
        (0..n)
            .map(|j| {
                let minor = a.clone().remove_row(0).remove_column(j);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * a[(0, j)] * cofactor_det(&minor)
            })
            .sum()
    }

    fn random_symmetric(n: usize, stream: RandomStream) -> DMatrix<f64> {
        let mut g = stream.gaussians();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = g.next().unwrap();
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        a
    }

    #[test]
    fn trivial_cases() {
        let r = symmetric_logdet(&DMatrix::identity(5, 5)).unwrap();
        assert_eq!(r.log_abs_det, 0.0);
        assert_eq!(r.negative, 0);
        let r = symmetric_logdet(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -3.0]))).unwrap();
        assert!((r.log_abs_det - 6f64.ln()).abs() < 1e-15);
        assert_eq!(r.negative, 1);
        assert!(symmetric_logdet(&DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn matches_cofactor_and_eigen_oracles() {
        for s in 0..40 {
            let n = 1 + s % 7;
            let a = random_symmetric(n, RandomStream::new(11, s as u64));
            let r = symmetric_logdet(&a).unwrap();
            let det = cofactor_det(&a);
            assert!((r.log_abs_det - det.abs().ln()).abs() < 1e-10 * (1.0 + det.abs().ln().abs()));
            let neg = a.clone().symmetric_eigenvalues().iter().filter(|&&x| x < 0.0).count();
            assert_eq!(r.negative, neg);
        }
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let mut d = vec![1.0, -2.0, 0.5, 3.0];
        let mut e = vec![0.3, 1.1, -0.7];
        let mut a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone()));
        for i in 0..3 {
            a[(i, i + 1)] = e[i];
            a[(i + 1, i)] = e[i];
        }
        let mut dense: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(|x, y| x.partial_cmp(y).unwrap());
        tridiagonal_eigenvalues(&mut d, &mut e).unwrap();
        for (x, y) in d.iter().zip(&dense) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
