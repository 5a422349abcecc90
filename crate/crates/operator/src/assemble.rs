//! Dense assembly of `𝓗 − E` and the analytic free normalization.

use nalgebra::DMatrix;
use sdm_core::{Boundary, Error, ModelParams, MomentumGrid, Result};

use crate::realization::OperatorRealization;

/// Default row limit for dense work.
pub const DENSE_GUARD: usize = 4096;

/// Lattice coordinates of site `s`, first axis fastest.
pub fn site_coords(s: usize, d: usize, l: usize) -> Vec<usize> {
    let mut r = s;
    (0..d)
        .map(|_| {
            let c = r % l;
            r /= l;
            c
        })
        .collect()
}

pub fn site_index(coords: &[usize], l: usize) -> usize {
    coords.iter().rev().fold(0, |acc, &c| acc * l + c)
}

/// `δ_ij(μ − E − tΔ)_xy + W_ij(x)δ_xy` as a dense `NM × NM` matrix.
pub fn assemble_dense(real: &OperatorRealization, e: f64) -> Result<DMatrix<f64>> {
    assemble_dense_guarded(real, e, DENSE_GUARD)
}

pub fn assemble_dense_guarded(real: &OperatorRealization, e: f64, limit: usize) -> Result<DMatrix<f64>> {
    let p = &real.params;
    let (n, d, l) = (p.n, p.d, p.l);
    let rows = p.dim();
    if rows > limit {
        return Err(Error::SizeGuard { rows, limit });
    }
    let shift = (p.mu - e) + real.laplacian_diagonal();
    let mut h = DMatrix::zeros(rows, rows);
    for s in 0..real.sites() {
        let block = real.onsite_block(s, shift);
        h.view_mut((s * n, s * n), (n, n)).copy_from(&block);
        let coords = site_coords(s, d, l);
        for axis in 0..d {
            for step in [1isize, -1] {
                let x = coords[axis] as isize + step;
                let nx = match p.boundary {
                    Boundary::Periodic => x.rem_euclid(l as isize) as usize,
                    Boundary::Dirichlet if x < 0 || x >= l as isize => continue,
                    Boundary::Dirichlet => x as usize,
                };
                let mut nc = coords.clone();
                nc[axis] = nx;
                let other = site_index(&nc, l);
                // A periodic axis of length 1 closes on the site itself and
                // cancels the diagonal; see `laplacian_diagonal`.
                if other == s {
                    continue;
                }
                for i in 0..n {
                    h[(s * n + i, other * n + i)] -= p.t;
                }
            }
        }
    }
    Ok(h)
}

/// `ln|det(μ − E − tΔ)|` over the `N` channels from the Laplacian spectrum;
/// the reference every `𝖾` is measured against.
pub fn free_logdet(p: &ModelParams, e: f64) -> f64 {
    let mass = p.mu - e;
    let grid = MomentumGrid::for_params(p);
    p.n as f64 * grid.laplacian_eigenvalues().iter().map(|d| (mass - p.t * d).abs().ln()).sum::<f64>()
}
