//! Experiment runners. Each kind turns a config into comparison rows
//! against an analytic reference.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use sdm_analytic::cubic::beta_of;
use sdm_analytic::{d0, d1, Model};
use sdm_core::numerics::stats::linear_fit;
use sdm_core::{Boundary, ContinuumParams, Error, ModelParams, RandomStream};
use sdm_dbm::{DbmConfig, DbmTrajectoryStats, HistogramSpec, Interaction};
use sdm_operator::dos::{edge_from_sqrt_onset, l1_distance, uniform_edges};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{HarnessError, HarnessResult};
use crate::report::{ComparisonReport, ComparisonRow};

/// Runs one experiment. `validate-all` returns its summary report only;
/// use [`run_all`] to also get the per-config reports.
pub fn run_experiment(cfg: &ExperimentConfig) -> HarnessResult<ComparisonReport> {
    Ok(run_all(cfg)?.pop().expect("at least one report"))
}

/// Runs an experiment and returns every report it produced, the
/// experiment's own report last.
pub fn run_all(cfg: &ExperimentConfig) -> HarnessResult<Vec<ComparisonReport>> {
    let start = Instant::now();
    let stream = RandomStream::new(cfg.seed, 0);
    let mut nested = vec![];
    let rows = match cfg.kind {
        ExperimentKind::Determinants => determinants(cfg, stream)?,
        ExperimentKind::NodeCount => node_count(cfg, stream)?,
        ExperimentKind::Moments => moments(cfg, stream)?,
        ExperimentKind::Dos => dos(cfg, stream)?,
        ExperimentKind::DbmCurrent => dbm_current(cfg, stream)?,
        ExperimentKind::DbmDensity => dbm_density(cfg, stream)?,
        ExperimentKind::Barrier => barrier(cfg)?,
        ExperimentKind::Passage => passage(cfg, stream)?,
        ExperimentKind::RateFunction => rate_function(cfg)?,
        ExperimentKind::D1Chain => d1_chain(cfg)?,
        ExperimentKind::Gle => gle(cfg, stream)?,
        ExperimentKind::ValidateAll => {
            let mut rows = vec![];
            for path in cfg.list::<String>("configs")? {
                let sub = ExperimentConfig::load(&cfg.base_dir.join(&path))?;
                if sub.kind == ExperimentKind::ValidateAll {
                    return Err(Error::Config(format!("{path}: validate-all cannot nest")).into());
                }
                let t = Instant::now();
                let report = run_experiment(&sub)?;
                let failed = report.rows.iter().filter(|r| !r.passed).count();
                let mut row = ComparisonRow::within(&sub.name, format!("rows={}", report.rows.len()), 0.0, failed as f64, f64::NAN, 0.0);
                if let Some(budget) = sub.max_seconds {
                    row.passed &= t.elapsed().as_secs_f64() <= budget;
                }
                rows.push(row);
                nested.push(report);
            }
            rows
        }
    };
    nested.push(ComparisonReport::new(&cfg.name, cfg.kind, rows, cfg.seed, start.elapsed().as_secs_f64()));
    Ok(nested)
}

fn at<T>(cfg: &ExperimentConfig, point: impl Into<String>, r: sdm_core::Result<T>) -> HarnessResult<T> {
    r.map_err(|source| HarnessError::AtPoint { experiment: cfg.name.clone(), point: point.into(), source })
}

/// Mixed `d = 1` Dirichlet chain with `N ≤ n_max`, `M ≤ l_max`.
fn random_chain(stream: RandomStream, n_max: usize, l_max: usize) -> ModelParams {
    let mut rng = stream.rng();
    ModelParams {
        d: 1,
        n: rng.random_range(1..=n_max),
        l: rng.random_range(1..=l_max),
        t: rng.random_range(0.5..1.5),
        j: rng.random_range(0.3..1.5),
        c: rng.random_range(0.0..1.0),
        mu: rng.random_range(-1.0..1.5),
        e: rng.random_range(-0.5..0.5),
        boundary: Boundary::Dirichlet,
    }
}

fn determinants(cfg: &ExperimentConfig, stream: RandomStream) -> HarnessResult<Vec<ComparisonRow>> {
    let instances: usize = cfg.get("instances", 100)?;
    let n_max: usize = cfg.get("n_max", 8)?;
    let l_max: usize = cfg.get("l_max", 32)?;
    let tol: f64 = cfg.get("tol", 1e-8)?;
    let methods = sdm_riccati::logdet_registry();
    let reference = methods.get("dense")?;
    // Per method: worst relative deviation, its instance and sign mismatches.
    let mut worst: Vec<(&str, f64, usize, usize)> =
        methods.names().into_iter().filter(|&m| m != "dense").map(|m| (m, 0.0, 0, 0)).collect();
    for i in 0..instances {
        let p = random_chain(stream.child(2 * i as u64), n_max, l_max);
        let point = format!("instance {i} ({})", p.to_kv().replace('\n', " "));
        let real = at(cfg, &point, sdm_operator::sample_operator(&p, stream.child(2 * i as u64 + 1)))?;
        let base = at(cfg, &point, reference.logdet(&real, p.e))?;
        let scale = base.log_abs_det.abs().max(1.0);
        for w in worst.iter_mut() {
            let r = at(cfg, &point, methods.get(w.0)?.logdet(&real, p.e))?;
            let dev = (r.log_abs_det - base.log_abs_det).abs() / scale;
            if dev > w.1 {
                w.1 = dev;
                w.2 = i;
            }
            w.3 += usize::from(r.sign_flips != base.sign_flips);
        }
    }
    let mut rows = vec![];
    for (m, dev, i, mismatches) in worst {
        rows.push(ComparisonRow::within(format!("{m} vs dense: relative log-det deviation"), format!("instances={instances};worst={i}"), 0.0, dev, f64::NAN, tol));
        rows.push(ComparisonRow::within(format!("{m} vs dense: inertia mismatches"), format!("instances={instances}"), 0.0, mismatches as f64, f64::NAN, 0.0));
    }
    Ok(rows)
}

fn node_count(cfg: &ExperimentConfig, stream: RandomStream) -> HarnessResult<Vec<ComparisonRow>> {
    let instances: usize = cfg.get("instances", 50)?;
    let energies: usize = cfg.get("energies", 20)?;
    let n_max: usize = cfg.get("n_max", 8)?;
    let l_max: usize = cfg.get("l_max", 32)?;
    let (mut mismatches, mut checks) = (0usize, 0usize);
    let mut first_bad = String::new();
    for i in 0..instances {
        let p = random_chain(stream.child(2 * i as u64), n_max, l_max);
        let real = at(cfg, format!("instance {i}"), sdm_operator::sample_operator(&p, stream.child(2 * i as u64 + 1)))?;
        let ev = at(cfg, format!("instance {i}"), sdm_operator::assemble_dense(&real, 0.0))?.symmetric_eigenvalues();
        let (lo, hi) = ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        for k in 0..energies {
            // Energies span the spectrum with a margin on both sides.
            let e = lo - 0.5 + (hi - lo + 1.0) * k as f64 / (energies.max(2) - 1) as f64;
            let exact = ev.iter().filter(|&&x| x < e).count();
            let flow = at(cfg, format!("instance {i}, E = {e}"), sdm_riccati::riccati_flow(&real, e))?;
            checks += 1;
            if flow.explosion_count != exact {
                mismatches += 1;
                if first_bad.is_empty() {
                    first_bad = format!(";first={i}@{e}");
                }
            }
        }
    }
    Ok(vec![ComparisonRow::within(
        "explosion count vs eigenvalue count: mismatches",
        format!("instances={instances};energies={energies};checks={checks}{first_bad}"),
        0.0,
        mismatches as f64,
        f64::NAN,
        0.0,
    )])
}

fn moments(cfg: &ExperimentConfig, stream: RandomStream) -> HarnessResult<Vec<ComparisonRow>> {
    let j: f64 = cfg.get("j", 1.0)?;
    let c: f64 = cfg.get("c", 1.0)?;
    let mus: Vec<f64> = cfg.list("mu")?;
    let ns: Vec<usize> = cfg.list("n")?;
    let qs: Vec<f64> = cfg.list("q")?;
    let samples: usize = cfg.get("samples", 10_000)?;
    let sampler_name: String = cfg.get("sampler", "zero-mode".to_string())?;
    let tol_se: f64 = cfg.get("tol_se", 3.0)?;
    let tol_rel: f64 = cfg.get("tol_rel", 0.0)?;
    let tol_abs: f64 = cfg.get("tol_abs", 0.0)?;
    let registry = sdm_operator::moment_sampler_registry();
    let sampler = registry.get(&sampler_name)?;
    let mut rows = vec![];
    for (mi, &mu) in mus.iter().enumerate() {
        let mut per_n = vec![];
        for (ni, &n) in ns.iter().enumerate() {
            let p = ModelParams { d: 0, n, l: 1, t: 1.0, j, c, mu, e: 0.0, boundary: Boundary::Periodic };
            let child = stream.child((mi * ns.len() + ni) as u64);
            per_n.push(at(cfg, format!("mu={mu};n={n}"), sdm_operator::moment_mc(&p, &qs, samples, child, sampler))?);
        }
        for (k, &q) in qs.iter().enumerate() {
            let vals: Vec<f64> = per_n.iter().map(|r| r.estimates[k].sigma_hat).collect();
            let ses: Vec<f64> = per_n.iter().map(|r| r.estimates[k].stderr).collect();
            let (value, se, how) = if ns.len() == 1 {
                (vals[0], ses[0], format!("n={}", ns[0]))
            } else {
                let fit = sdm_operator::extrapolate_inverse_n(&ns, &vals, &ses);
                let list: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                (fit.intercept, fit.intercept_se, format!("n->inf from {}", list.join("/")))
            };
            let reference = at(cfg, format!("mu={mu};q={q}"), sdm_analytic::sigma_q(q, &Model::zero_dim(mu, j)))?;
            let tol = (tol_se * se).max(tol_rel * reference.abs()).max(tol_abs);
            rows.push(ComparisonRow::within("sigma_q", format!("mu={mu};q={q};{how};sampler={sampler_name}"), reference, value, se, tol));
        }
    }
    Ok(rows)
}

fn dos(cfg: &ExperimentConfig, stream: RandomStream) -> HarnessResult<Vec<ComparisonRow>> {
    let tilde_j: f64 = cfg.get("tilde_j", 2.0)?;
    let cont = ContinuumParams {
        tilde_t: 1.0,
        tilde_j,
        c: 0.0,
        mu: 0.0,
        e: 0.0,
        length: cfg.get("length", 20.0)?,
    };
    let a: f64 = cfg.get("a", 0.05)?;
    let n: usize = cfg.get("n", 40)?;
    let realizations: usize = cfg.get("realizations", 50)?;
    let (lo, hi): (f64, f64) = (cfg.get("lo", -4.0)?, cfg.get("hi", 6.0)?);
    let bins: usize = cfg.get("bins", 100)?;
    let coarse_bins: usize = cfg.get("coarse_bins", 50)?;
    let tol_l1: f64 = cfg.get("tol_l1", 0.05)?;
    let tol_edge_rel: f64 = cfg.get("tol_edge_rel", 0.05)?;
    let p = sdm_operator::map_continuum_to_lattice(&cont, a, n)?;
    let inputs = format!("a={a};n={n};m={};realizations={realizations}", p.l);
    let edges = uniform_edges(lo, hi, bins);
    let h = at(cfg, &inputs, sdm_operator::dos_histogram(&p, &edges, realizations, stream))?;
    let coarse = h
        .rebin(&uniform_edges(lo, hi, coarse_bins))
        .ok_or_else(|| Error::Config(format!("coarse_bins = {coarse_bins} must divide bins = {bins}")))?;
    let reference = |x: f64| sdm_analytic::dos_continuum_d1(x, tilde_j);
    let l1 = l1_distance(&coarse.edges, &coarse.density_per_length(a), reference);
    let edge = sdm_analytic::spectral_edge(tilde_j);
    let (fit_lo, fit_hi): (f64, f64) = (cfg.get("edge_fit_lo", 0.1)?, cfg.get("edge_fit_hi", 0.8)?);
    let fitted = edge_from_sqrt_onset(&h.centers(), &h.density_per_length(a), edge + fit_lo, edge + fit_hi)
        .ok_or_else(|| HarnessError::AtPoint { experiment: cfg.name.clone(), point: inputs.clone(), source: Error::NoRoot("edge fit failed".into()) })?;
    Ok(vec![
        ComparisonRow::below("density L1 distance", format!("{inputs};window={lo}..{hi};bins={coarse_bins}"), tol_l1, l1, f64::NAN),
        ComparisonRow::within("left spectral edge", format!("{inputs};fit=edge+{fit_lo}..edge+{fit_hi}"), edge, fitted, f64::NAN, tol_edge_rel * edge.abs()),
    ])
}

fn dbm_run(cfg: &ExperimentConfig, dbm: &DbmConfig, stream: RandomStream) -> HarnessResult<DbmTrajectoryStats> {
    at(cfg, format!("N={};E={}", dbm.n, dbm.e), sdm_dbm::dbm_simulate(dbm, stream))
}

fn dbm_base(cfg: &ExperimentConfig, n: usize, e: f64, tilde_j: f64, total_time: f64) -> HarnessResult<DbmConfig> {
    let mut dbm = DbmConfig::new(n, e, tilde_j);
    dbm.total_time = total_time;
    dbm.dt = cfg.get("dt", 1e-3)?;
    dbm.interaction = Interaction::Pairwise;
    Ok(dbm)
}

fn dbm_current(cfg: &ExperimentConfig, stream: RandomStream) -> HarnessResult<Vec<ComparisonRow>> {
    let n: usize = cfg.get("n", 100)?;
    let tilde_j: f64 = cfg.get("tilde_j", 1.0)?;
    let offsets: Vec<f64> = cfg.list("e_offsets")?;
    let confined: f64 = cfg.get("confined_offset", -1.0)?;
    let total_time: f64 = cfg.get("total_time", 1e3)?;
    let tol_rel: f64 = cfg.get("tol_rel", 0.1)?;
    let max_crossings: f64 = cfg.get("max_confined_crossings", 0.0)?;
    let beta = beta_of(tilde_j);
    let e_star = sdm_analytic::spectral_edge(tilde_j);
    let mut rows: Vec<ComparisonRow> = offsets
        .par_iter()
        .enumerate()
        .map(|(i, &off)| {
            let e = e_star + off;
            let s = dbm_run(cfg, &dbm_base(cfg, n, e, tilde_j, total_time)?, stream.child(i as u64))?;
            let reference = sdm_analytic::resolvent_constant(e, beta).current();
            Ok(ComparisonRow::within(
                "current per particle",
                format!("N={n};E-E*={off};T={:.0}", s.time),
                reference,
                s.measured_current,
                s.current_stderr(),
                tol_rel * reference,
            ))
        })
        .collect::<HarnessResult<_>>()?;
    let e = e_star + confined;
    let s = dbm_run(cfg, &dbm_base(cfg, n, e, tilde_j, total_time)?, stream.child(offsets.len() as u64))?;
    rows.push(ComparisonRow::within(
        "crossings after burn-in",
        format!("N={n};E-E*={confined};T={:.0}", s.time),
        0.0,
        s.crossings as f64,
        f64::NAN,
        max_crossings,
    ));
    Ok(rows)
}

fn dbm_density(cfg: &ExperimentConfig, stream: RandomStream) -> HarnessResult<Vec<ComparisonRow>> {
    let n: usize = cfg.get("n", 100)?;
    let tilde_j: f64 = cfg.get("tilde_j", 1.0)?;
    let offset: f64 = cfg.get("e_offset", -1.0)?;
    let total_time: f64 = cfg.get("total_time", 1e3)?;
    let bins: usize = cfg.get("bins", 240)?;
    let tol_l1: f64 = cfg.get("tol_l1", 0.05)?;
    let tol_se: f64 = cfg.get("tol_se", 3.0)?;
    let beta = beta_of(tilde_j);
    let e_star = sdm_analytic::spectral_edge(tilde_j);

    let e = e_star + offset;
    let rc = sdm_analytic::resolvent_constant(e, beta);
    // The mean position carries an O(1/N) correction, so it is
    // extrapolated over `mean_n`; the density is checked at `n`.
    let mean_ns: Vec<usize> = cfg.list_or("mean_n", vec![n])?;
    let mut sizes = mean_ns.clone();
    if !sizes.contains(&n) {
        sizes.push(n);
    }
    let runs: Vec<DbmTrajectoryStats> = sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| {
            let mut dbm = dbm_base(cfg, size, e, tilde_j, total_time)?;
            dbm.histogram.bins = bins;
            dbm_run(cfg, &dbm, stream.child(10 + i as u64))
        })
        .collect::<HarnessResult<_>>()?;
    let s = &runs[sizes.iter().position(|&m| m == n).expect("n is in sizes")];
    let inputs = format!("N={n};E-E*={offset};T={:.0}", s.time);
    let l1 = sdm_dbm::l1_to_density(s, |x| rc.density(x));
    let (means, ses): (Vec<f64>, Vec<f64>) = mean_ns.iter().map(|m| sdm_dbm::dbm_trz_average(&runs[sizes.iter().position(|x| x == m).unwrap()])).unzip();
    let (mean, se, how) = if mean_ns.len() == 1 {
        (means[0], ses[0], format!("N={}", mean_ns[0]))
    } else {
        let fit = sdm_operator::extrapolate_inverse_n(&mean_ns, &means, &ses);
        let raw: Vec<String> = mean_ns.iter().zip(&means).map(|(m, v)| format!("{m}:{v:.5}")).collect();
        (fit.intercept, fit.intercept_se, format!("N->inf from {}", raw.join("/")))
    };
    let mut rows = vec![
        ComparisonRow::below("stationary density L1 distance", format!("{inputs};bins={bins}"), tol_l1, l1, f64::NAN),
        ComparisonRow::within("time-averaged mean position", format!("{how};E-E*={offset};T={:.0}", s.time), rc.mean_position(), mean, se, tol_se * se),
    ];

    let cn: usize = cfg.get("critical_n", 100)?;
    let ct: f64 = cfg.get("critical_time", 300.0)?;
    let mut crit = dbm_base(cfg, cn, e_star, tilde_j, ct)?;
    crit.burn_in = cfg.get("critical_burn_in", 50.0)?;
    crit.histogram = HistogramSpec { lo: cfg.get("critical_lo", -1.5)?, hi: cfg.get("critical_hi", 2.5)?, bins: cfg.get("critical_bins", 160)? };
    let (fit_lo, fit_hi): (f64, f64) = (cfg.get("fit_lo", 0.2)?, cfg.get("fit_hi", 1.0)?);
    let tol_exponent: f64 = cfg.get("tol_exponent", 0.15)?;
    let s = dbm_run(cfg, &crit, stream.child(1))?;
    // At E* the two lower roots merge into the edge γ−; γ+ is the upper end.
    let rc = sdm_analytic::resolvent_constant(e_star, beta);
    let (gm, gp) = (rc.outer_roots.0.re, rc.outer_roots.1.re);
    let curve = sdm_dbm::dbm_density(&s);
    let fit = sdm_dbm::edge_exponent(&curve, gm, fit_lo, fit_hi, |x| (gp - x).max(0.0).sqrt()).ok_or_else(|| {
        HarnessError::AtPoint { experiment: cfg.name.clone(), point: "E = E*".into(), source: Error::NoRoot("too few occupied bins for the edge fit".into()) }
    })?;
    rows.push(ComparisonRow::within(
        "left-edge exponent at E*",
        format!("N={cn};T={:.0};window=edge+{fit_lo}..edge+{fit_hi}", s.time),
        1.5,
        fit.slope,
        fit.slope_se,
        tol_exponent,
    ));
    Ok(rows)
}

fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = if points > 1 { (hi / lo).ln() / (points - 1) as f64 } else { 0.0 };
    (0..points).map(|k| lo * (step * k as f64).exp()).collect()
}

fn barrier(cfg: &ExperimentConfig) -> HarnessResult<Vec<ComparisonRow>> {
    let tilde_j: f64 = cfg.get("tilde_j", 1.0)?;
    let points: usize = cfg.get("points", 50)?;
    let span: f64 = cfg.get("span", 5.0)?;
    let tol: f64 = cfg.get("tol", 1e-10)?;
    let tol_exponent: f64 = cfg.get("tol_exponent", 0.02)?;
    let beta = beta_of(tilde_j);
    let e_star = sdm_analytic::spectral_edge(tilde_j);
    let u = |e: f64| at(cfg, format!("E={e}"), sdm_analytic::barrier_height(e, beta));
    let mut rows = vec![];
    for k in 1..=points {
        let e = e_star - span * k as f64 / points as f64;
        let closed = u(e)?;
        let quad = at(cfg, format!("E={e}"), sdm_analytic::barrier_quadrature(e, beta, 1e-13))?;
        rows.push(ComparisonRow::within("closed form vs quadrature", format!("E={e}"), quad, closed, f64::NAN, tol * quad.abs().max(1.0)));
    }
    let mut exponent = |label: &str, lo: f64, hi: f64, want: f64, x_of: &dyn Fn(f64) -> f64| -> HarnessResult<()> {
        let xs = log_spaced(lo, hi, points);
        let ln_x: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ln_u: Vec<f64> = xs.iter().map(|&x| u(x_of(x)).map(f64::ln)).collect::<HarnessResult<_>>()?;
        let fit = linear_fit(&ln_x, &ln_u, None);
        rows.push(ComparisonRow::within(label, format!("range={lo}..{hi}"), want, fit.slope, fit.slope_se, tol_exponent));
        Ok(())
    };
    exponent("near-edge exponent in E*-E", cfg.get("near_lo", 1e-4)?, cfg.get("near_hi", 1e-2)?, 1.25, &|d| e_star - d)?;
    exponent("deep-well exponent in |E|", cfg.get("deep_lo", 1e3)?, cfg.get("deep_hi", 1e5)?, 1.5, &|a| -a)?;
    Ok(rows)
}

fn passage(cfg: &ExperimentConfig, stream: RandomStream) -> HarnessResult<Vec<ComparisonRow>> {
    let tilde_j: f64 = cfg.get("tilde_j", 1.0)?;
    let offset: f64 = cfg.get("e_offset", -0.7)?;
    let ns: Vec<usize> = cfg.list("n")?;
    let trials: usize = cfg.get("trials", 100)?;
    let max_time: f64 = cfg.get("max_time", 1e5)?;
    let tol_rel: f64 = cfg.get("tol_rel", 0.25)?;
    let beta = beta_of(tilde_j);
    let e = sdm_analytic::spectral_edge(tilde_j) + offset;
    let mut medians = vec![];
    for (i, &n) in ns.iter().enumerate() {
        let dbm = dbm_base(cfg, n, e, tilde_j, max_time)?;
        let point = format!("N={n};E-E*={offset}");
        let samples = at(cfg, &point, sdm_dbm::first_passage_ensemble(&dbm, trials, max_time, stream.child(i as u64)))?;
        medians.push(at(cfg, &point, sdm_dbm::median_passage(&samples))?);
        log::info!("passage N = {n}: median {:.4e}", medians[i]);
    }
    let (slope, se) = sdm_dbm::arrhenius_slope(&ns, &medians);
    let reference = at(cfg, format!("E={e}"), sdm_analytic::barrier_height(e, beta))? / (tilde_j * tilde_j);
    let list: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
    Ok(vec![ComparisonRow::within(
        "slope of ln(median passage time) in N",
        format!("E-E*={offset};N={};trials={trials}", list.join("/")),
        reference,
        slope,
        se,
        tol_rel * reference,
    )])
}

fn rate_function(cfg: &ExperimentConfig) -> HarnessResult<Vec<ComparisonRow>> {
    let j: f64 = cfg.get("j", 1.0)?;
    let mu: f64 = cfg.get("mu", 0.5)?;
    let points: usize = cfg.get("points", 50)?;
    let (e_lo, e_hi): (f64, f64) = (cfg.get("e_lo", 0.23)?, cfg.get("e_hi", 1.6)?);
    let (q_lo, q_hi): (f64, f64) = (cfg.get("q_lo", -0.99)?, cfg.get("q_hi", 8.0)?);
    let tol: f64 = cfg.get("tol", 1e-6)?;
    let model = Model::zero_dim(mu, j);
    let sigma = |q: f64| sdm_analytic::sigma_q(q, &model).unwrap_or(f64::INFINITY);
    let e_typ = d0::e_typ(mu, j);
    let mut rows = vec![];
    for k in 0..points {
        let e = e_lo + (e_hi - e_lo) * k as f64 / (points.max(2) - 1) as f64;
        let point = format!("mu={mu};e={e}");
        let r = at(cfg, &point, sdm_analytic::rate_function(e, &model))?;
        let (_, legendre) = sdm_analytic::legendre_numeric(e, sigma, q_lo, q_hi);
        rows.push(ComparisonRow::within("numeric Legendre transform vs rate function", point.clone(), r.phi, legendre, f64::NAN, tol));
        if e >= e_typ && e < d0::e_c(mu, j) {
            // Scaling form against the generic saddle route.
            let x = j * j * (e - e_typ) / (mu * mu);
            let scaling = mu * mu / (j * j) * d0::phi_scaling(x);
            let generic = at(cfg, &point, sdm_analytic::rate_function(e, &model.numeric()))?;
            rows.push(ComparisonRow::within("scaling form vs generic rate function", point, generic.phi, scaling, f64::NAN, tol));
        }
    }
    Ok(rows)
}

fn d1_chain(cfg: &ExperimentConfig) -> HarnessResult<Vec<ComparisonRow>> {
    let j: f64 = cfg.get("j", 1.0)?;
    let qs: Vec<f64> = cfg.list("q")?;
    let mus: Vec<f64> = cfg.list("mu")?;
    let tol: f64 = cfg.get("tol", 1e-6)?;
    let mut rows = vec![];
    for &q in &qs {
        let mb = d1::mu_b(q, j);
        let point = format!("q={q};mu_b={mb}");
        let target = d1::transition_value(q, j);
        let below = at(cfg, &point, d1::sigma_q_complex(q, mb * (1.0 - 1e-10), j, 1e-12))?;
        let above = at(cfg, &point, d1::sigma_q_simple(q, mb, j))?;
        rows.push(ComparisonRow::within("complex phase at mu_b vs transition value", point.clone(), target, below, f64::NAN, tol));
        rows.push(ComparisonRow::within("simple phase at mu_b vs transition value", point, target, above, f64::NAN, tol));
    }
    for &mu in &mus {
        let point = format!("mu={mu}");
        let closed = at(cfg, &point, d1::e_typ_closed(mu, j))?;
        let integral = at(cfg, &point, d1::e_typ_dos_integral(mu, j, 1e-11))?;
        rows.push(ComparisonRow::within("typical value: saddle vs density integral", point, integral, closed, f64::NAN, tol));
    }
    Ok(rows)
}

fn gle(cfg: &ExperimentConfig, stream: RandomStream) -> HarnessResult<Vec<ComparisonRow>> {
    let tilde_j: f64 = cfg.get("tilde_j", 1.0)?;
    let e: f64 = cfg.get("e", -2.0)?;
    let c: f64 = cfg.get("c", 1.0)?;
    let n: usize = cfg.get("n", 8)?;
    let a: f64 = cfg.get("a", 0.05)?;
    let lengths: Vec<f64> = cfg.list("lengths")?;
    let samples: usize = cfg.get("samples", 2000)?;
    let q: f64 = cfg.get("q", 1.0)?;
    let tol_abs: f64 = cfg.get("tol_abs", 0.05)?;
    let reference = at(cfg, format!("E={e}"), sdm_analytic::generalized_lyapunov(q, e, tilde_j))?;
    let mut estimates = vec![];
    for (i, &length) in lengths.iter().enumerate() {
        let cont = ContinuumParams { tilde_t: 1.0, tilde_j, c, mu: 0.0, e, length };
        let est = at(cfg, format!("length={length}"), sdm_riccati::gle_continuum(&cont, a, n, q, samples, stream.child(i as u64)))?;
        estimates.push(est);
    }
    let mut rows = vec![];
    for w in estimates.windows(2) {
        let (prev, next) = ((w[0].lambda_per_channel - reference).abs(), (w[1].lambda_per_channel - reference).abs());
        rows.push(ComparisonRow::below(
            "distance to the infinite-length value shrinks",
            format!("q={q};E={e};length={} after {}", w[1].length, w[0].length),
            prev,
            next,
            w[1].stderr,
        ));
    }
    let x: Vec<f64> = estimates.iter().map(|g| 1.0 / g.length).collect();
    let y: Vec<f64> = estimates.iter().map(|g| g.lambda_per_channel).collect();
    let s: Vec<f64> = estimates.iter().map(|g| g.stderr).collect();
    let fit = linear_fit(&x, &y, s.iter().all(|v| *v > 0.0).then_some(&s[..]));
    let list: Vec<String> = lengths.iter().map(|l| l.to_string()).collect();
    rows.push(ComparisonRow::within(
        "1/length extrapolation",
        format!("q={q};E={e};lengths={};drift={:.4}/length", list.join("/"), fit.slope),
        reference,
        fit.intercept,
        fit.intercept_se,
        (3.0 * fit.intercept_se).max(tol_abs),
    ));
    Ok(rows)
}
