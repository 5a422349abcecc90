//! Property and oracle tests of sampling, determinants, moments and the
//! density of states.

use proptest::prelude::*;
use sdm_core::numerics::stats;
use sdm_core::{Boundary, ContinuumParams, ModelParams, RandomStream};
use sdm_operator::dos::{dos_histogram, l1_distance, uniform_edges};
use sdm_operator::moments::{moment_mc, ZeroMode};
use sdm_operator::{
    assemble_dense, extrapolate_inverse_n, logdet_block_recursion, logdet_dense, logdet_registry, map_continuum_to_lattice,
    sample_operator,
};

fn d1_params(n: usize, l: usize, t: f64, j: f64, c: f64, mass: f64, periodic: bool) -> ModelParams {
    let boundary = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
    ModelParams { d: 1, n, l, t, j, c, mu: mass, e: 0.0, boundary }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_recursion_equals_dense(
        n in 1usize..6, l in 1usize..16, t in 0.2f64..2.0, j in 0.1f64..2.0, c in 0.0f64..2.0,
        mass in -3.0f64..3.0, periodic in any::<bool>(), seed in 0u64..1000,
    ) {
        let p = d1_params(n, l, t, j, c, mass, periodic);
        let real = sample_operator(&p, RandomStream::new(seed, 0)).unwrap();
        let dense = logdet_dense(&assemble_dense(&real, 0.0).unwrap()).unwrap();
        let block = logdet_block_recursion(&real, 0.0).unwrap();
        prop_assert!((dense.log_abs_det - block.log_abs_det).abs() <= 1e-9 * dense.log_abs_det.abs().max(1.0));
        prop_assert_eq!(dense.sign_flips, block.sign_flips);
    }

    #[test]
    fn canonicalization_bit_for_bit(mu in -2.0f64..3.0, e in -2.0f64..2.0, seed in 0u64..1000, periodic in any::<bool>()) {
        let p = ModelParams { mu, e, ..d1_params(3, 7, 1.0, 1.0, 1.0, 0.0, periodic) };
        let a = sample_operator(&p, RandomStream::new(seed, 1)).unwrap();
        let b = sample_operator(&p.canonicalize(), RandomStream::new(seed, 1)).unwrap();
        let reg = logdet_registry();
        for (_, m) in reg.iter() {
            match (m.logdet(&a, e), m.logdet(&b, 0.0)) {
                (Ok(x), Ok(y)) => {
                    prop_assert_eq!(x.log_abs_det.to_bits(), y.log_abs_det.to_bits());
                    prop_assert_eq!(x.sign_flips, y.sign_flips);
                }
                (x, y) => prop_assert_eq!(x.is_err(), y.is_err()),
            }
        }
    }

    #[test]
    fn assembled_matrix_is_symmetric(d in 0usize..3, l in 1usize..5, seed in 0u64..100, periodic in any::<bool>()) {
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
        let p = ModelParams { d, l, n: 3, boundary, ..Default::default() };
        let h = assemble_dense(&sample_operator(&p, RandomStream::new(seed, 2)).unwrap(), 0.4).unwrap();
        prop_assert_eq!(&h, &h.transpose());
    }
}

/// Two-sample Kolmogorov–Smirnov p-value (asymptotic series).
fn ks_p_value(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let p: f64 = (1..100).map(|k| 2.0 * (-1f64).powi(k as i32 - 1) * (-2.0 * (k * k) as f64 * lambda * lambda).exp()).sum();
    p.clamp(0.0, 1.0)
}

#[test]
fn ensemble_symmetry_under_disorder_reflection() {
    // At μ = E = 0 the law of ln|det| is invariant under (H, ξ) → (−H, −ξ).
    // In d = 1 the staggered sign map carries −tΔ into 4t + tΔ, so the
    // exact reflection point there is the band center μ − E = −2t.
    for (p, e) in [
        (ModelParams { d: 0, n: 6, l: 1, mu: 0.0, ..Default::default() }, 0.0),
        (ModelParams { mu: -2.0, ..d1_params(4, 6, 1.0, 1.0, 1.0, 0.0, false) }, 0.0),
    ] {
        let draws = 2000;
        let plain: Vec<f64> =
            (0..draws).map(|i| logdet_registry().get("dense").unwrap().logdet(&sample_operator(&p, RandomStream::new(1, i)).unwrap(), e).unwrap().log_abs_det).collect();
        let flipped: Vec<f64> = (0..draws)
            .map(|i| {
                let real = sample_operator(&p, RandomStream::new(2, i)).unwrap().negated();
                logdet_registry().get("dense").unwrap().logdet(&real, e).unwrap().log_abs_det
            })
            .collect();
        assert!(ks_p_value(&plain, &flipped) > 0.01);
    }
}

#[test]
fn ks_detects_a_shift() {
    let a: Vec<f64> = RandomStream::new(1, 0).gaussians().take(2000).collect();
    let b: Vec<f64> = RandomStream::new(1, 1).gaussians().take(2000).map(|x| x + 0.3).collect();
    assert!(ks_p_value(&a, &b) < 1e-6);
}

#[test]
fn trace_log_self_averages() {
    // Across-GOE variance of (1/N) Tr ln|K + X + μ| at fixed ξ shrinks with N.
    let ns = [20usize, 40, 80];
    let mut vars = vec![];
    for &n in &ns {
        let p = ModelParams { c: 0.0, ..d1_params(n, 4, 1.0, 1.0, 0.0, 0.8, false) };
        let xi = [0.3, -0.2, 0.1, 0.0];
        let vals: Vec<f64> = (0..200)
            .map(|i| {
                let mut real = sample_operator(&p, RandomStream::new(6, i)).unwrap();
                real.xi = xi.to_vec();
                logdet_block_recursion(&real, 0.0).unwrap().log_abs_det / n as f64
            })
            .collect();
        vars.push(stats::variance(&vals));
    }
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = vars.iter().map(|v| v.ln()).collect();
    assert!(stats::linear_fit(&x, &y, None).slope < 0.0, "{vars:?}");
}

#[test]
fn block_recursion_cost_is_linear_in_length() {
    let time = |l: usize| {
        let p = d1_params(24, l, 1.0, 1.0, 1.0, 0.5, false);
        let real = sample_operator(&p, RandomStream::new(0, 0)).unwrap();
        (0..5)
            .map(|_| {
                let t = std::time::Instant::now();
                logdet_block_recursion(&real, 0.0).unwrap();
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let ratio = time(800) / time(400);
    assert!((1.4..=2.6).contains(&ratio), "time ratio {ratio}");
}

#[test]
fn zero_dim_moments_and_typical_value() {
    // Σ̂_1 and the 𝖾 mean at μ = 0.5J, extrapolated in 1/N.
    let ns = [25usize, 50, 100];
    let (mut s1, mut s1e, mut em, mut ee) = (vec![], vec![], vec![], vec![]);
    for &n in &ns {
        let p = ModelParams { d: 0, n, l: 1, mu: 0.5, j: 1.0, c: 1.0, ..Default::default() };
        let run = moment_mc(&p, &[1.0], 3000, RandomStream::new(8, n as u64), &ZeroMode::default()).unwrap();
        s1.push(run.estimates[0].sigma_hat);
        s1e.push(run.estimates[0].stderr);
        em.push(run.e_mean);
        ee.push(run.e_stderr);
    }
    let sigma = extrapolate_inverse_n(&ns, &s1, &s1e);
    assert!((sigma.intercept - 0.318147).abs() < (3.0 * sigma.intercept_se).max(0.05 * 0.318147), "{sigma:?}");
    let e = extrapolate_inverse_n(&ns, &em, &ee);
    let want = sdm_analytic::d0::e_typ(0.5, 1.0);
    assert!((e.intercept - want).abs() < 3.0 * e.intercept_se, "{e:?} vs {want}");
}

#[test]
fn lattice_dos_converges_to_continuum() {
    let cont = ContinuumParams { tilde_t: 1.0, tilde_j: 2.0, c: 0.0, mu: 0.0, e: 0.0, length: 40.0 };
    // A long chain keeps finite-length clumping below the discretization error.
    let edges = uniform_edges(-4.0, 20.0, 24);
    let mut gaps = vec![];
    for &a in &[0.2, 0.1, 0.05] {
        let p = map_continuum_to_lattice(&cont, a, 16).unwrap();
        let h = dos_histogram(&p, &edges, 30, RandomStream::new(3, 0)).unwrap();
        let rho = h.density_per_length(a);
        gaps.push(l1_distance(&edges, &rho, |x| sdm_analytic::dos_continuum_d1(x, 2.0)));
    }
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}
