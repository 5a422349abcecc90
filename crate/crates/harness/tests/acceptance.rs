//! Acceptance suite: one checked-in config per criterion, each with its
//! tolerances and wall-clock budget. Prints one PASS/FAIL line per
//! criterion. Arguments not starting with `-` filter criteria by name.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use sdm_harness::{run_experiment, ExperimentConfig};

const CRITERIA: [(&str, &str); 12] = [
    ("01-determinants", "dense, block and transfer-matrix log-determinants agree"),
    ("02-node-count", "explosion count equals the eigenvalue count"),
    ("03-moments-d0", "single-site moment growth rates"),
    ("04-simple-phase", "first moment vanishes in the simple phase"),
    ("05-dos", "lattice spectrum against the continuum density of states"),
    ("06-dbm-current", "eigenvalue-diffusion current law"),
    ("07-dbm-density", "stationary density, mean position and edge exponent"),
    ("08-barrier", "barrier closed form and asymptotic exponents"),
    ("09-arrhenius", "Arrhenius slope of first-passage times"),
    ("10-rate-function", "Legendre duality and scaling form"),
    ("11-d1-chain", "one-dimensional consistency chain"),
    ("12-gle", "generalized Lyapunov exponent at finite length"),
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/acceptance");
    let mut failed = 0;
    let mut ran = 0;
    for (name, title) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let cfg = match ExperimentConfig::load(&dir.join(format!("{name}.cfg"))) {
            Ok(c) => c,
            Err(e) => {
                println!("FAIL {name}: {title}: config error: {e}");
                failed += 1;
                continue;
            }
        };
        let start = Instant::now();
        let outcome = run_experiment(&cfg);
        let secs = start.elapsed().as_secs_f64();
        let budget = cfg.max_seconds.unwrap_or(f64::INFINITY);
        match outcome {
            Ok(report) => {
                let in_time = secs <= budget;
                let ok = report.passed && in_time;
                failed += usize::from(!ok);
                println!(
                    "{} {name}: {title} ({secs:.1} s of {budget} s{})",
                    if ok { "PASS" } else { "FAIL" },
                    if in_time { "" } else { ", over budget" }
                );
                for row in report.rows.iter().filter(|r| !r.passed || report.rows.len() <= 8) {
                    println!("  {}", row.summary_line());
                }
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {title} ({secs:.1} s): {e}");
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
