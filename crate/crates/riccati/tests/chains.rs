//! Cross-checks of the transfer-matrix flow against the operator crate and
//! the analytic kit.

use sdm_core::numerics::stats;
use sdm_core::{Boundary, ModelParams, RandomStream};
use sdm_operator::moments::{moment_mc, Direct};
use sdm_operator::{assemble_dense, free_logdet, logdet_block_recursion, logdet_dense, sample_operator};
use sdm_riccati::{free_log_integral, gle_mc, lyapunov_sums, riccati_flow, riccati_logdet};

fn mixed_params(s: u64) -> ModelParams {
    ModelParams {
        d: 1,
        n: 1 + (s as usize % 8),
        l: 1 + (s as usize * 13) % 32,
        t: 0.5 + 0.05 * (s % 11) as f64,
        j: 0.3 + 0.1 * (s % 9) as f64,
        c: 0.25 * (s % 5) as f64,
        mu: -1.0 + 0.13 * (s % 17) as f64,
        e: -0.5 + 0.07 * (s % 13) as f64,
        boundary: Boundary::Dirichlet,
    }
}

#[test]
fn three_determinants_agree() {
    for s in 0..100 {
        let p = mixed_params(s);
        let real = sample_operator(&p, RandomStream::new(31, s)).unwrap();
        let dense = logdet_dense(&assemble_dense(&real, p.e).unwrap()).unwrap();
        let block = logdet_block_recursion(&real, p.e).unwrap();
        let flow = riccati_logdet(&real, p.e).unwrap();
        assert!((dense.log_abs_det - block.log_abs_det).abs() <= 1e-9 * dense.log_abs_det.abs().max(1.0), "s={s}");
        assert!((flow.log_abs_det - block.log_abs_det).abs() <= 1e-8, "s={s}");
        assert_eq!(dense.sign_flips, flow.sign_flips, "s={s}");
    }
}

#[test]
fn gle_at_q_one_is_moment_plus_free_offset() {
    let p = ModelParams { d: 1, n: 3, l: 10, t: 1.0, j: 0.9, c: 1.0, mu: 0.5, e: 0.0, boundary: Boundary::Dirichlet };
    let stream = RandomStream::new(12, 0);
    let g = gle_mc(&p, 1.0, p.e, 256, stream).unwrap();
    let m = moment_mc(&p, &[1.0], 256, stream, &Direct).unwrap();
    let volume = p.dim() as f64;
    let offset = (free_logdet(&p, p.e) - volume * p.t.ln()) / volume;
    assert!((g.lambda_per_channel - (m.estimates[0].sigma_hat + offset)).abs() < 1e-10);
}

#[test]
fn lyapunov_sum_approaches_typical_value() {
    // Σγ/N − ∫ln(μ − tΔ) + ln t → 𝖾_typ, extrapolated linearly in 1/N.
    let base = ModelParams { d: 1, n: 8, l: 4096, t: 1.0, j: 1.0, c: 1.0, mu: 0.6, e: 0.0, boundary: Boundary::Periodic };
    let want = sdm_analytic::e_typ(&sdm_analytic::Model::lattice(&base)).unwrap();
    let ns = [8usize, 16, 32];
    let (mut vals, mut ses) = (vec![], vec![]);
    for &n in &ns {
        let p = ModelParams { n, ..base };
        let v: Vec<f64> = (0..6)
            .map(|s| lyapunov_sums(&p, 0.0, 20_000, RandomStream::new(9, s), 10).unwrap().mean_exponent() - free_log_integral(0.6, 1.0))
            .collect();
        let (m, se) = stats::mean_stderr(&v);
        vals.push(m);
        ses.push(se);
    }
    assert!(vals.windows(2).all(|w| (w[1] - want).abs() < (w[0] - want).abs()));
    let fit = sdm_operator::extrapolate_inverse_n(&ns, &vals, &ses);
    assert!((fit.intercept - want).abs() < 2e-3, "{} vs {want}", fit.intercept);
}

#[test]
fn node_count_on_small_instances() {
    for s in 0..20 {
        let p = ModelParams { n: 1 + s as usize % 8, l: 2 + (s as usize * 5) % 31, ..mixed_params(s) };
        let real = sample_operator(&p, RandomStream::new(41, s)).unwrap();
        let ev = assemble_dense(&real, 0.0).unwrap().symmetric_eigenvalues();
        let (lo, hi) = ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        for k in 0..20 {
            let e = lo - 0.5 + (hi - lo + 1.0) * k as f64 / 19.0;
            let count = ev.iter().filter(|&&x| x < e).count();
            assert_eq!(riccati_flow(&real, e).unwrap().explosion_count, count, "s={s} k={k}");
        }
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn flow_matches_dense_spectrum(n in 1usize..6, l in 1usize..12, j in 0.1f64..2.0, mu in -1.0f64..1.0, e in -3.0f64..3.0, seed in 0u64..1000) {
            let p = ModelParams { d: 1, n, l, t: 1.0, j, c: 0.5, mu, e, boundary: Boundary::Dirichlet };
            let real = sample_operator(&p, RandomStream::new(seed, 0)).unwrap();
            let ev = assemble_dense(&real, 0.0).unwrap().symmetric_eigenvalues();
            let gap = ev.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
            prop_assume!(gap > 1e-6);
            let flow = riccati_flow(&real, e).unwrap();
            prop_assert_eq!(flow.explosion_count, ev.iter().filter(|&&x| x < e).count());
            let dense: f64 = ev.iter().map(|x| (x - e).abs().ln()).sum();
            prop_assert!((flow.log_abs_det - dense).abs() <= 1e-8 * dense.abs().max(1.0));
        }
    }
}
