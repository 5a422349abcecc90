//! Shared building blocks: parameter records, momentum grids, phase labels,
//! reproducible random streams, a strategy registry and small numerical
//! kernels used by the analytic and stochastic crates.

pub mod error;
pub mod grid;
pub mod kv;
pub mod numerics;
pub mod params;
pub mod phase;
pub mod registry;
pub mod rng;

pub use error::{Error, Result};
pub use grid::{ContinuumLine, KMeasure, MomentumGrid};
pub use kv::{KvDoc, KvMap};
pub use params::{Boundary, ContinuumParams, ModelParams};
pub use phase::{DbmPhase, SaddlePhase};
pub use registry::Registry;
pub use rng::RandomStream;

pub use num_complex::Complex64;
