//! Experiment configs, runners and comparison reports tying the analytic
//! references to the Monte Carlo and simulation crates.

pub mod config;
pub mod curves;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{HarnessError, HarnessResult};
pub use experiments::{run_all, run_experiment};
pub use report::{Check, ComparisonReport, ComparisonRow};
