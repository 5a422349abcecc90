//! Transfer-matrix evaluation for `d = 1`: exact log-determinants with
//! node counting, Lyapunov sums and generalized Lyapunov exponents.

pub mod flow;
pub mod lyapunov;

pub use flow::{logdet_registry, riccati_flow, riccati_logdet, FlowResult, FlowState, Riccati};
pub use lyapunov::{free_log_integral, free_rate, gle_continuum, gle_mc, lyapunov_sums, GleEstimate, LyapunovSpectrumResult};
