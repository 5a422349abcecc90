//! Closed and semi-closed forms: the cubic resolvent constant, densities
//! of states, saddle points, moment growth rates `Σ_q`, rate functions,
//! barrier heights and generalized Lyapunov exponents.

pub mod cubic;
pub mod d0;
pub mod d1;
pub mod dos;
pub mod lyapunov;
pub mod model;
pub mod pastur;
pub mod rate;
pub mod saddle;

pub use cubic::{
    barrier_height, barrier_quadrature, dbm_stationary_density, double_root, dos_tail_estimate, resolvent_constant,
    spectral_edge, ResolventConstant,
};
pub use dos::{dos_continuum_d1, dos_registry, SpectralDensityCurve};
pub use lyapunov::generalized_lyapunov;
pub use model::{MeasureKind, Model};
pub use pastur::{f_integral, pastur_density, pastur_resolvent};
pub use rate::{e_typ, legendre_numeric, rate_function, var_e, RatePoint};
pub use saddle::{larkin_mass, phase_boundary_mu_b, saddle_numeric, saddle_solve, sigma_q, SaddleSolution};
