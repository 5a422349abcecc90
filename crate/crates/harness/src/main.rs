use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sdm_analytic::Model;
use sdm_core::{Boundary, ContinuumParams, ModelParams, RandomStream};
use sdm_harness::curves::{curve_rows, emit_curves, CurveKind, CurveSpec};
use sdm_harness::report::fmt_num;
use sdm_harness::{run_all, ComparisonReport, ExperimentConfig};

#[derive(Parser)]
#[command(name = "sdm", version, about = "Random operator determinants, eigenvalue diffusion and their analytic references")]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for reports and curves; tables go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic curves.
    Analytic {
        #[command(subcommand)]
        curve: AnalyticCmd,
    },
    /// Lattice operator: determinants, moments, density of states.
    Operator {
        #[command(subcommand)]
        cmd: OperatorCmd,
    },
    /// Transfer-matrix chains.
    Riccati {
        #[command(subcommand)]
        cmd: RiccatiCmd,
    },
    /// Eigenvalue diffusion.
    Dbm {
        #[command(subcommand)]
        cmd: DbmCmd,
    },
    /// Run one experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, `key=value`.
        #[arg(long = "set")]
        overrides: Vec<String>,
    },
    /// Run the acceptance suite (a validate-all config).
    Validate {
        #[arg(long, default_value = "crates/harness/configs/acceptance/validate-all.cfg")]
        config: PathBuf,
    },
}

#[derive(Args, Clone, Copy)]
struct Grid {
    #[arg(long, allow_negative_numbers = true)]
    lo: f64,
    #[arg(long, allow_negative_numbers = true)]
    hi: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dim {
    ZeroDim,
    Continuum,
}

#[derive(Subcommand)]
enum AnalyticCmd {
    /// Continuum density of states ρ_K(α).
    Dos {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        tilde_j: f64,
        /// Evaluator: wr, cardano or current.
        #[arg(long, default_value = "wr")]
        method: String,
        #[command(flatten)]
        grid: Grid,
    },
    /// Moment growth rate Σ_q against q.
    SigmaQ {
        #[arg(long, value_enum, default_value_t = Dim::ZeroDim)]
        model: Dim,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        j: f64,
        #[command(flatten)]
        grid: Grid,
    },
    /// Rate function Φ(𝖾).
    Rate {
        #[arg(long, value_enum, default_value_t = Dim::ZeroDim)]
        model: Dim,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        j: f64,
        #[command(flatten)]
        grid: Grid,
    },
    /// Barrier U(E) below the edge.
    Barrier {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        tilde_j: f64,
        #[command(flatten)]
        grid: Grid,
    },
    /// Resolvent constant 𝒥(E).
    Jconst {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        tilde_j: f64,
        #[command(flatten)]
        grid: Grid,
    },
}

#[derive(Args, Clone, Copy)]
struct Lattice {
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    l: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    t: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    j: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    c: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    mu: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    e: f64,
    /// periodic or dirichlet.
    #[arg(long, default_value = "dirichlet")]
    boundary: Boundary,
}

impl Lattice {
    fn params(&self) -> sdm_core::Result<ModelParams> {
        let p = ModelParams { d: self.d, n: self.n, l: self.l, t: self.t, j: self.j, c: self.c, mu: self.mu, e: self.e, boundary: self.boundary };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Subcommand)]
enum OperatorCmd {
    /// ln|det(𝓗 − E)| of one realization.
    Logdet {
        #[command(flatten)]
        lattice: Lattice,
        /// dense, block or riccati.
        #[arg(long, default_value = "block")]
        method: String,
    },
    /// Moment Monte Carlo of |det|^q.
    Moments {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, allow_negative_numbers = true, value_delimiter = ',', default_value = "0.5,1")]
        q: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// direct or zero-mode.
        #[arg(long, default_value = "direct")]
        method: String,
    },
    /// Eigenvalue histogram of the lattice mapped from the continuum.
    Dos {
        #[arg(long, allow_negative_numbers = true, default_value_t = 2.0)]
        tilde_j: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 20.0)]
        length: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.05)]
        a: f64,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        realizations: usize,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 6.0)]
        hi: f64,
    },
}

#[derive(Subcommand)]
enum RiccatiCmd {
    /// Lyapunov sums of a long chain.
    Lyapunov {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, default_value_t = 10_000)]
        chain_length: usize,
        #[arg(long, default_value_t = 10)]
        interval: usize,
    },
    /// Generalized Lyapunov exponent of the continuum chain.
    Gle {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        tilde_j: f64,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        e: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.05)]
        a: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 8.0)]
        length: f64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        q: f64,
    },
}

#[derive(Subcommand)]
enum DbmCmd {
    /// One stationary trajectory.
    Run {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        tilde_j: f64,
        /// Energy relative to the edge E*.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        e_offset: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 100.0)]
        time: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1e-3)]
        dt: f64,
    },
    /// First-passage ensemble from the droplet.
    Passage {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        tilde_j: f64,
        #[arg(long, default_value_t = -0.7, allow_hyphen_values = true)]
        e_offset: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1e5)]
        max_time: f64,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Harness(#[from] sdm_harness::HarnessError),
    #[error(transparent)]
    Core(#[from] sdm_core::Error),
    #[error("output: {0}")]
    Output(String),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every comparison passed (always true for commands that
/// compare nothing).
fn execute(cli: &Cli) -> Result<bool, CliError> {
    let stream = RandomStream::new(cli.seed, 0);
    match &cli.command {
        Command::Analytic { curve } => analytic(cli, curve).map(|_| true),
        Command::Operator { cmd } => operator(cli, cmd, stream).map(|_| true),
        Command::Riccati { cmd } => riccati(cli, cmd, stream).map(|_| true),
        Command::Dbm { cmd } => dbm(cli, cmd, stream).map(|_| true),
        Command::Run { config, overrides } => {
            let mut cfg = ExperimentConfig::load(config)?;
            for o in overrides {
                let (k, v) = o.split_once('=').ok_or_else(|| sdm_core::Error::Config(format!("override `{o}` is not key=value")))?;
                cfg.set(k.trim(), v.trim())?;
            }
            if cli.seed != 1 {
                cfg.seed = cli.seed;
            }
            reports(cli, &cfg)
        }
        Command::Validate { config } => reports(cli, &ExperimentConfig::load(config)?),
    }
}

fn reports(cli: &Cli, cfg: &ExperimentConfig) -> Result<bool, CliError> {
    let all = run_all(cfg)?;
    let out = cli.out.clone().or_else(|| cfg.out_dir.clone());
    for r in &all {
        eprintln!("{} {} ({:.1} s)", if r.passed { "PASS" } else { "FAIL" }, r.experiment, r.runtime_seconds);
        eprint!("{}", r.summary());
        match &out {
            Some(dir) => {
                let (csv, json) = r.write(dir)?;
                eprintln!("  wrote {} and {}", csv.display(), json.display());
            }
            None => print_report(cli.format, r)?,
        }
    }
    Ok(all.last().is_some_and(|r| r.passed))
}

fn print_report(format: Format, r: &ComparisonReport) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => r.to_csv()?,
        Format::Json => r.to_json()? + "\n",
    };
    std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
}

/// Writes a table to stdout as CSV or as a JSON array of objects.
fn table(format: Format, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    let text = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(header).map_err(|e| CliError::Output(e.to_string()))?;
            for r in rows {
                w.write_record(r.iter().map(|&v| fmt_num(v))).map_err(|e| CliError::Output(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Output(e.to_string()))?).map_err(|e| CliError::Output(e.to_string()))?
        }
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| header.iter().zip(r).map(|(h, v)| (h.to_string(), serde_json::json!(v))).collect())
                .collect();
            serde_json::to_string_pretty(&objs).map_err(|e| CliError::Output(e.to_string()))? + "\n"
        }
    };
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
}

fn analytic(cli: &Cli, cmd: &AnalyticCmd) -> Result<(), CliError> {
    let registry = sdm_analytic::dos_registry();
    let model = |dim: Dim, mu: f64, j: f64| match dim {
        Dim::ZeroDim => Model::zero_dim(mu, j),
        Dim::Continuum => Model::continuum(mu, j),
    };
    let (kind, m, grid, method) = match cmd {
        AnalyticCmd::Dos { tilde_j, method, grid } => (CurveKind::Dos, Model::continuum(0.0, *tilde_j), grid, method.as_str()),
        AnalyticCmd::SigmaQ { model: d, mu, j, grid } => (CurveKind::SigmaQ, model(*d, *mu, *j), grid, "wr"),
        AnalyticCmd::Rate { model: d, mu, j, grid } => (CurveKind::Rate, model(*d, *mu, *j), grid, "wr"),
        AnalyticCmd::Barrier { tilde_j, grid } => (CurveKind::Barrier, Model::continuum(0.0, *tilde_j), grid, "wr"),
        AnalyticCmd::Jconst { tilde_j, grid } => (CurveKind::Jconst, Model::continuum(0.0, *tilde_j), grid, "wr"),
    };
    let spec = CurveSpec { model: m, lo: grid.lo, hi: grid.hi, points: grid.points, dos: registry.get(method)? };
    match &cli.out {
        Some(dir) => {
            let path = emit_curves(kind, &spec, dir)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => table(cli.format, kind.header(), &curve_rows(kind, &spec)),
    }
}

fn operator(cli: &Cli, cmd: &OperatorCmd, stream: RandomStream) -> Result<(), CliError> {
    match cmd {
        OperatorCmd::Logdet { lattice, method } => {
            let p = lattice.params()?;
            let registry = sdm_riccati::logdet_registry();
            let real = sdm_operator::sample_operator(&p, stream)?;
            let r = registry.get(method)?.logdet(&real, p.e)?;
            eprintln!("method {}", r.method);
            table(cli.format, &["log_abs_det", "negative_eigenvalues"], &[vec![r.log_abs_det, r.sign_flips as f64]])
        }
        OperatorCmd::Moments { lattice, q, samples, method } => {
            let p = lattice.params()?;
            let registry = sdm_operator::moment_sampler_registry();
            let run = sdm_operator::moment_mc(&p, q, *samples, stream, registry.get(method)?)?;
            let mut rows: Vec<Vec<f64>> = run.estimates.iter().map(|e| vec![e.q, e.sigma_hat, e.stderr]).collect();
            rows.push(vec![f64::NAN, run.e_mean, run.e_stderr]);
            eprintln!("last row: mean of (1/(N L^d)) ln|det| (q = NaN)");
            table(cli.format, &["q", "sigma_hat", "stderr"], &rows)
        }
        OperatorCmd::Dos { tilde_j, length, a, n, realizations, bins, lo, hi } => {
            let cont = ContinuumParams { tilde_j: *tilde_j, length: *length, ..Default::default() };
            let p = sdm_operator::map_continuum_to_lattice(&cont, *a, *n)?;
            let edges = sdm_operator::dos::uniform_edges(*lo, *hi, *bins);
            let h = sdm_operator::dos_histogram(&p, &edges, *realizations, stream)?;
            let rows: Vec<Vec<f64>> = h
                .centers()
                .into_iter()
                .zip(h.density_per_length(*a))
                .map(|(x, r)| vec![x, r, sdm_analytic::dos_continuum_d1(x, *tilde_j)])
                .collect();
            table(cli.format, &["alpha", "rho", "rho_continuum"], &rows)
        }
    }
}

fn riccati(cli: &Cli, cmd: &RiccatiCmd, stream: RandomStream) -> Result<(), CliError> {
    match cmd {
        RiccatiCmd::Lyapunov { lattice, chain_length, interval } => {
            let p = lattice.params()?;
            let r = sdm_riccati::lyapunov_sums(&p, p.e, *chain_length, stream, *interval)?;
            let rows: Vec<Vec<f64>> = r.exponents.iter().enumerate().map(|(i, &g)| vec![(i + 1) as f64, g]).collect();
            eprintln!("mean exponent {}", r.mean_exponent());
            table(cli.format, &["index", "exponent"], &rows)
        }
        RiccatiCmd::Gle { tilde_j, e, c, n, a, length, samples, q } => {
            let cont = ContinuumParams { tilde_t: 1.0, tilde_j: *tilde_j, c: *c, mu: 0.0, e: *e, length: *length };
            let g = sdm_riccati::gle_continuum(&cont, *a, *n, *q, *samples, stream)?;
            let reference = sdm_analytic::generalized_lyapunov(*q, *e, *tilde_j).unwrap_or(f64::NAN);
            table(cli.format, &["q", "length", "lambda", "stderr", "infinite_length"], &[vec![*q, g.length, g.lambda_per_channel, g.stderr, reference]])
        }
    }
}

fn dbm(cli: &Cli, cmd: &DbmCmd, stream: RandomStream) -> Result<(), CliError> {
    match cmd {
        DbmCmd::Run { n, tilde_j, e_offset, time, dt } => {
            let e = sdm_analytic::spectral_edge(*tilde_j) + e_offset;
            let mut cfg = sdm_dbm::DbmConfig::new(*n, e, *tilde_j);
            cfg.total_time = *time;
            cfg.dt = *dt;
            cfg.interaction = sdm_dbm::Interaction::Pairwise;
            let s = sdm_dbm::dbm_simulate(&cfg, stream)?;
            let rc = sdm_analytic::resolvent_constant(e, cfg.beta());
            let (m, se) = sdm_dbm::dbm_trz_average(&s);
            table(
                cli.format,
                &["E", "current", "current_stderr", "current_theory", "mean", "mean_stderr", "mean_theory", "crossings", "time"],
                &[vec![e, s.measured_current, s.current_stderr(), rc.current(), m, se, rc.mean_position(), s.crossings as f64, s.time]],
            )
        }
        DbmCmd::Passage { n, tilde_j, e_offset, trials, max_time } => {
            let e = sdm_analytic::spectral_edge(*tilde_j) + e_offset;
            let mut cfg = sdm_dbm::DbmConfig::new(*n, e, *tilde_j);
            cfg.interaction = sdm_dbm::Interaction::Pairwise;
            let samples = sdm_dbm::first_passage_ensemble(&cfg, *trials, *max_time, stream)?;
            let rows: Vec<Vec<f64>> = samples.iter().map(|s| vec![s.time, f64::from(u8::from(s.censored))]).collect();
            match sdm_dbm::median_passage(&samples) {
                Ok(m) => eprintln!("median passage time {m:.4e}"),
                Err(e) => eprintln!("median unavailable: {e}"),
            }
            table(cli.format, &["time", "censored"], &rows)
        }
    }
}
