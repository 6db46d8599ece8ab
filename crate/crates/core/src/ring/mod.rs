//! Exact scalars, truncated q-series and sparse Laurent polynomials.

mod divide;
mod laurent;
mod qseries;
mod rational;

pub use divide::{divide_exact, DEFAULT_FLOOR_MARGIN};
pub use laurent::{permutation_sign, poly, ExpVec, LaurentPoly, VarImage};
pub use qseries::{QSeries, EXACT};
pub use rational::{clear_denominators, format_rational, parse_rational, pow_i, rat, ratio, Rational};


