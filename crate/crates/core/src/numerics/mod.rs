//! Thin numerical kernels shared across crates.

pub mod linalg;
pub mod quad;
pub mod roots;
pub mod stats;
