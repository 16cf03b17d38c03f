//! Shifted quadratic lattices over ℤ: p-adic structure invariants of
//! diagonal lattices, exact counts of quadratic congruence solutions modulo
//! odd prime powers, and certified lower bounds on Siegel mass ratios and
//! class numbers of shifted lattices `L + u/c`.

pub mod arith;
pub mod conductor;
pub mod count;
pub mod error;
pub mod mass;
pub mod padic;
pub mod ser;
pub mod verify;

pub use arith::{RationalInterval, Valuation};
pub use error::{Error, Result};
pub use padic::{DiagonalForm, LocalContext, LocalVector};

/// Exact rational scalar used for every bound.
pub type Rational = num_rational::BigRational;
/// Machine integer scalar for coefficients and coordinates.
pub type Int = i64;
