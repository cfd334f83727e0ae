//! Twist permutations `P` of `[N]`, stored 0-based as image vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwistError {
    #[error("unknown twist {0:?} (expected grand, two-cycle, stride, involution or identity)")]
    Unknown(String),
    #[error("twist {twist} is not defined for N = {n}")]
    Undefined { twist: Twist, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Twist {
    /// `(1 2 … N)`.
    Grand,
    /// `(1 … ⌈N/2⌉)(⌈N/2⌉+1 … N)`.
    TwoCycle,
    /// `i ↦ i + 2 mod N`, a single `N`-cycle when `N` is odd.
    Stride,
    /// `(1 2)(3 4)…`, with the last point fixed when `N` is odd.
    Involution,
    Identity,
}

impl Twist {
    pub fn permutation(self, n: usize) -> Result<Vec<usize>, TwistError> {
        if n == 0 {
            return Err(TwistError::Undefined { twist: self, n });
        }
        Ok(match self {
            Twist::Grand => (0..n).map(|i| (i + 1) % n).collect(),
            Twist::TwoCycle => {
                let a = n.div_ceil(2);
                (0..n).map(|i| if i < a { (i + 1) % a } else { a + (i - a + 1) % (n - a) }).collect()
            }
            Twist::Stride => {
                if n % 2 == 0 {
                    return Err(TwistError::Undefined { twist: self, n });
                }
                (0..n).map(|i| (i + 2) % n).collect()
            }
            Twist::Involution => (0..n).map(|i| if i % 2 == 0 { if i + 1 < n { i + 1 } else { i } } else { i - 1 }).collect(),
            Twist::Identity => (0..n).collect(),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Twist::Grand => "grand",
            Twist::TwoCycle => "two-cycle",
            Twist::Stride => "stride",
            Twist::Involution => "involution",
            Twist::Identity => "identity",
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Twist {
    type Err = TwistError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grand" | "grand-cycle" => Ok(Twist::Grand),
            "two-cycle" => Ok(Twist::TwoCycle),
            "stride" => Ok(Twist::Stride),
            "involution" => Ok(Twist::Involution),
            "identity" => Ok(Twist::Identity),
            other => Err(TwistError::Unknown(other.to_string())),
        }
    }
}

/// Cycle lengths of a 0-based permutation of `[N]`, sorted ascending.
pub fn cycle_lengths(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for start in 0..p.len() {
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            len += 1;
            x = p[x];
        }
        if len > 0 {
            out.push(len);
        }
    }
    out.sort_unstable();
    out
}

pub fn is_bijection(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// Every cycle of `p` is longer than `2k`, the hypothesis under which the index
/// count does not depend on `p`.
pub fn is_admissible(p: &[usize], k: usize) -> bool {
    cycle_lengths(p).first().is_some_and(|&m| m > 2 * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(cycle_lengths(&Twist::Grand.permutation(7).unwrap()), vec![7]);
        assert_eq!(cycle_lengths(&Twist::TwoCycle.permutation(11).unwrap()), vec![5, 6]);
        assert_eq!(cycle_lengths(&Twist::Stride.permutation(9).unwrap()), vec![9]);
        assert_eq!(cycle_lengths(&Twist::Involution.permutation(5).unwrap()), vec![1, 2, 2]);
        assert_eq!(cycle_lengths(&Twist::Identity.permutation(3).unwrap()), vec![1, 1, 1]);
        assert!(Twist::Stride.permutation(8).is_err());
        assert_ne!(Twist::Stride.permutation(7).unwrap(), Twist::Grand.permutation(7).unwrap());
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(&Twist::Grand.permutation(5).unwrap(), 2));
        assert!(!is_admissible(&Twist::Grand.permutation(3).unwrap(), 2));
        assert!(!is_admissible(&Twist::TwoCycle.permutation(9).unwrap(), 2));
        assert!(is_admissible(&Twist::TwoCycle.permutation(11).unwrap(), 2));
    }

    #[test]
    fn parse_names() {
        for t in [Twist::Grand, Twist::TwoCycle, Twist::Stride, Twist::Involution, Twist::Identity] {
            assert_eq!(t.name().parse::<Twist>().unwrap(), t);
        }
        assert!("spiral".parse::<Twist>().is_err());
    }
}
