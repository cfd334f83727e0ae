//! Exact arithmetic over Z[N] and its field of fractions, plus Laurent
//! expansion at `N = ∞`. All values are immutable.

mod linsolve;
mod poly;
mod ratfun;
mod series;

use num_bigint::BigInt;
use thiserror::Error;

pub use linsolve::solve_linear_system;
pub use poly::Polynomial;
pub use ratfun::RationalFunction;
pub use series::{inverse_power_coeffs, series_in_inverse_n, SeriesTail};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("series of the zero function has no leading power")]
    ZeroFunction,
    #[error("series order must be at least 1")]
    InvalidOrder,
    #[error("function grows at infinity; no expansion in nonnegative powers of 1/N")]
    Unbounded,
    #[error("linear system is singular")]
    SingularSystem,
    #[error("linear system is not square")]
    NotSquare,
    #[error("pole at N = {0}")]
    PoleAt(BigInt),
}
