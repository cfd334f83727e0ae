//! Eigenvalue moments of permutation-twisted COE matrices.
//!
//! `M_k(N) = <|Tr (P U)^k|^2>` over the circular orthogonal ensemble, with `P` a
//! permutation matrix whose cycles are all longer than `2k`, is computed exactly
//! as a rational function of `N` by summing COE Weingarten functions over `S_2k`.
//! Alongside the exact route the crate provides the graph model used to count
//! index assignments, the regular/irregular classification census, and a
//! seeded Monte Carlo sampler for floating-point cross-checks.

pub mod classify;
pub mod exactalg;
pub mod graphmodel;
pub mod moments;
pub mod montecarlo;
pub mod partition;
pub mod perm;
pub mod twist;
pub mod weingarten;

pub use exactalg::{Polynomial, RationalFunction, SeriesTail};
pub use partition::Partition;
pub use perm::Permutation;
