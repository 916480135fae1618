//! Exact scalars and truncated multivariate Taylor expansions.
//!
//! All geometry in this crate is evaluated at a rational sample point of a
//! chart.  A smooth function is represented near that point by its [`Jet`]:
//! the finitely many Taylor coefficients up to a fixed total degree, stored
//! exactly.  Ring operations on jets mirror the operations on functions, so
//! an identity between functions that holds on the chart forces the
//! corresponding jets to agree coefficient by coefficient — and a nonzero
//! residual coefficient is a finite, checkable witness of failure.
//!
//! Jets are generic over the coefficient [`Scalar`]: arbitrary-precision
//! rationals for certified runs, or a fixed prime field for a fast
//! prescreen pass with identical control flow.

mod expr;
mod jet;
mod linalg;
mod multiindex;
mod sample;
mod scalar;

pub use expr::Expression;
pub use jet::Jet;
pub use linalg::{symmetric_signature, JetMatrix};
pub use multiindex::{MultiIndex, MAX_TOTAL_DEGREE, MAX_VARIABLES};
pub use sample::SampleStream;
pub use scalar::{format_rational, parse_rational, rat, Fp, Rational, Scalar, PRESCREEN_PRIME};
