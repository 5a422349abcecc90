//! Dyson Brownian motion of `N` eigenvalues in the cubic potential
//! `−(E + λ²)`, with blow-up at `−∞` and reinjection from `+∞`.

pub mod analysis;
pub mod config;
pub mod passage;
pub mod simulate;

pub use analysis::{dbm_density, dbm_trz_average, edge_exponent, l1_to_density, mass_within};
pub use config::{default_burn_in, default_cutoff, DbmConfig, HistogramSpec, Interaction, Start};
pub use passage::{arrhenius_slope, first_passage_ensemble, median_passage, PassageSample};
pub use simulate::{compute_forces, dbm_simulate, droplet_positions, DbmTrajectoryStats};
