use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AlgError, Polynomial, RationalFunction};

/// The first `order` coefficients of a Laurent expansion at `N = ∞`:
/// `f(N) = Σ coeffs[i] · N^-(start_power + i) + (undetermined higher terms)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTail {
    pub start_power: i64,
    #[serde(with = "rational_strings")]
    pub coeffs: Vec<BigRational>,
    pub order: usize,
}

impl SeriesTail {
    /// Coefficient of `N^-power`, if `power` lies inside the computed window.
    /// Powers below `start_power` have coefficient zero.
    pub fn coeff_of_inverse_power(&self, power: i64) -> Option<BigRational> {
        if power < self.start_power {
            return Some(BigRational::zero());
        }
        self.coeffs.get((power - self.start_power) as usize).cloned()
    }

    /// Sum of the computed terms as a rational function.
    pub fn truncation(&self) -> RationalFunction {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let power = self.start_power + i as i64;
                &RationalFunction::from_rational(c) * &RationalFunction::var_pow(-(power as i32))
            })
            .sum()
    }
}

/// Renders as `3 + 3/N^3 + ...`, omitting zero terms.
impl fmt::Display for SeriesTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = self.start_power + i as i64;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let mag_str = if mag.is_integer() { mag.numer().to_string() } else { format!("({mag})") };
            match power.cmp(&0) {
                std::cmp::Ordering::Equal => write!(f, "{mag_str}")?,
                std::cmp::Ordering::Greater if power == 1 => write!(f, "{mag_str}/N")?,
                std::cmp::Ordering::Greater => write!(f, "{mag_str}/N^{power}")?,
                std::cmp::Ordering::Less => {
                    let mag_prefix = if mag.is_one() { String::new() } else { mag_str };
                    if power == -1 {
                        write!(f, "{mag_prefix}N")?
                    } else {
                        write!(f, "{mag_prefix}N^{}", -power)?
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + ...")
    }
}

/// Expand `f` in inverse powers of `N`, keeping `order` terms starting at the
/// leading one.
pub fn series_in_inverse_n(f: &RationalFunction, order: usize) -> Result<SeriesTail, AlgError> {
    if f.is_zero() {
        return Err(AlgError::ZeroFunction);
    }
    if order == 0 {
        return Err(AlgError::InvalidOrder);
    }
    let start_power = f.order_at_infinity().unwrap();
    // With x = 1/N: num(N) = N^dn · p(x), den(N) = N^dd · q(x), where p and q are the
    // coefficient lists reversed. Then f = x^(dd-dn) · p(x)/q(x) with q(0) = lc(den) ≠ 0.
    let reversed = |poly: &Polynomial| -> Vec<BigRational> {
        poly.coeffs().iter().rev().map(|c| BigRational::from_integer(c.clone())).collect()
    };
    let p = reversed(f.numer());
    let q = reversed(f.denom());
    let q0_inv = q[0].recip();
    let mut out: Vec<BigRational> = Vec::with_capacity(order);
    for n in 0..order {
        let mut acc = p.get(n).cloned().unwrap_or_else(BigRational::zero);
        for j in 1..=n.min(q.len() - 1) {
            acc -= &q[j] * &out[n - j];
        }
        out.push(acc * &q0_inv);
    }
    Ok(SeriesTail { start_power, coeffs: out, order })
}

/// Coefficients of `N^-1`, `N^-2`, … `N^-count` in `f`, i.e. the window starting at power 1
/// regardless of where `f` itself starts. Requires `f` to be bounded at infinity.
pub fn inverse_power_coeffs(f: &RationalFunction, count: usize) -> Result<Vec<BigRational>, AlgError> {
    if f.is_zero() {
        return Ok(vec![BigRational::zero(); count]);
    }
    let tail = series_in_inverse_n(f, count + 1)?;
    if tail.start_power < 0 {
        return Err(AlgError::Unbounded);
    }
    Ok((1..=count as i64).map(|p| tail.coeff_of_inverse_power(p).unwrap()).collect())
}

mod rational_strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        use serde::de::Error;
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| {
                let (n, dd) = s.split_once('/').unwrap_or((s, "1"));
                let n: BigInt = n.parse().map_err(D::Error::custom)?;
                let dd: BigInt = dd.parse().map_err(D::Error::custom)?;
                Ok(BigRational::new(n, dd))
            })
            .collect()
    }
}
