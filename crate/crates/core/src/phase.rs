use std::fmt;

use serde::{Deserialize, Serialize};

/// Saddle-point regime: `y = 0` (simple) or `y > 0` (complex).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SaddlePhase {
    Simple,
    Complex,
}

/// Steady state of the eigenvalue diffusion: bounded droplet or a
/// stationary current through infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DbmPhase {
    Confined,
    Current,
}

impl fmt::Display for SaddlePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SaddlePhase::Simple => "simple",
            SaddlePhase::Complex => "complex",
        })
    }
}

impl fmt::Display for DbmPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DbmPhase::Confined => "confined",
            DbmPhase::Current => "current",
        })
    }
}
