//! Exact and precision-tracked scalars, polynomials and truncated Laurent series.

pub mod ext;
pub mod fp;
pub mod laurent;
pub mod padic;
pub mod poly;
pub mod rational;
pub mod ratfunc;
pub mod factor;
pub mod scalar;

pub use fp::Fp;
pub use laurent::LaurentSeries;
pub use padic::{PAdic, EXACT};
pub use poly::Poly;
pub use rational::Rational;
pub use scalar::Scalar;
pub use ratfunc::RationalFunction;
