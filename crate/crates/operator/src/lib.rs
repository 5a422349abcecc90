//! The discrete matrix-valued operator `𝓗 = μ − tΔ + W` on `L^d` sites:
//! disorder sampling, dense assembly, exact log-determinants by several
//! methods, moment Monte Carlo and the empirical density of states.

pub mod assemble;
pub mod dos;
pub mod logdet;
pub mod moments;
pub mod realization;

pub use assemble::{assemble_dense, free_logdet, DENSE_GUARD};
pub use dos::{dos_histogram, map_continuum_to_lattice, DosHistogram};
pub use logdet::{logdet_auto, logdet_block_recursion, logdet_dense, logdet_registry, LogDetMethod, LogDetResult};
pub use moments::{extrapolate_inverse_n, moment_mc, moment_sampler_registry, MomentEstimate, MomentRun, MomentSampler};
pub use realization::{sample_operator, OperatorRealization};
