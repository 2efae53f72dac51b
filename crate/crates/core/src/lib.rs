//! Adelic residue pairings, adelic cohomology of P1 over a field and over the
//! integers, and arithmetic Riemann-Roch for metrized lattices, all computed at
//! explicit finite precision.

pub mod arith;
pub mod arith_curve;
pub mod ctx;
pub mod curve;
pub mod error;
pub mod json;
pub mod linalg;
pub mod local2d;
pub mod surface;

pub use ctx::PrecisionCtx;
pub use error::{Error, Result};
