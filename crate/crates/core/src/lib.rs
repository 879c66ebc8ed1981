//! Exact arithmetic, Gevrey series, differential and q-difference operators,
//! operator guessing and p-adic summation.

pub mod arith;
pub mod error;
pub mod guess;
pub mod linalg;
pub mod padic;
pub mod padic_sum;
pub mod pfrac;
pub mod poly;
pub mod q;
pub mod series;
pub mod weyl;

pub use arith::{QContext, Rational};
pub use error::{Error, Result};
pub use guess::{Guess, GuessConfig, OperatorBasis, Reconstruction};
pub use padic::PAdicValue;
pub use padic_sum::{FactorialSeriesSpec, PadicSum, TelescopeResult};
pub use pfrac::{PartialFraction, PoleTerm};
pub use poly::{Poly, RationalFunction};
pub use q::{QDiffOp, QKind, QLaurentSeries, QMode, QOp};
pub use series::{FormalSeries, GevreyOrder, GevreySeries, GrowthVerdict};
pub use weyl::{DiffOp, Location, NewtonPolygon, Recurrence, Verdict};
