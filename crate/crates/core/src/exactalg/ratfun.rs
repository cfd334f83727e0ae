use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AlgError, Polynomial};

/// A reduced ratio of integer polynomials in `N`.
///
/// Canonical form: the numerator and denominator share no polynomial factor and
/// no integer factor, and the denominator's leading coefficient is positive.
/// Zero is `0/1`. Canonical form makes structural equality coincide with
/// equality of rational functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgError> {
        if den.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    pub fn from_int(c: impl Into<BigInt>) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    /// `N^power`, negative powers allowed.
    pub fn var_pow(power: i32) -> Self {
        if power >= 0 {
            Self::from_poly(Polynomial::monomial(1, power as usize))
        } else {
            RationalFunction { num: Polynomial::one(), den: Polynomial::monomial(1, (-power) as usize) }
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::reduce(Polynomial::constant(r.numer().clone()), Polynomial::constant(r.denom().clone()))
    }

    fn reduce(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides numerator"), den.div_exact(&g).expect("gcd divides denominator"))
        };
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num.div_scalar_exact(&c).unwrap();
            den = den.div_scalar_exact(&c).unwrap();
        }
        if den.leading_coeff().is_some_and(Signed::is_negative) {
            num = -num;
            den = -den;
        }
        RationalFunction { num, den }
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value, if this function does not depend on `N`.
    pub fn as_constant(&self) -> Option<BigRational> {
        if !self.is_constant() {
            return None;
        }
        Some(BigRational::new(self.num.coeff(0), self.den.coeff(0)))
    }

    /// Order of vanishing at infinity: `deg den - deg num`. `None` for zero.
    pub fn order_at_infinity(&self) -> Option<i64> {
        let dn = self.num.degree()? as i64;
        Some(self.den.degree().unwrap() as i64 - dn)
    }

    pub fn recip(&self) -> Result<Self, AlgError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RationalFunction) -> Result<Self, AlgError> {
        if rhs.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        Ok(Self::reduce(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::reduce(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        Self::reduce(&self.num * p, self.den.clone())
    }

    /// Exact value at an integer point.
    pub fn eval(&self, n: &BigInt) -> Result<BigRational, AlgError> {
        let d = self.den.eval(n);
        if d.is_zero() {
            return Err(AlgError::PoleAt(n.clone()));
        }
        Ok(BigRational::new(self.num.eval(n), d))
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        self.num.eval_f64(n) / self.den.eval_f64(n)
    }

    /// Human-oriented rendering with the denominator split into integer linear
    /// factors where possible, e.g. `3(N^3+3N^2-N-2)/((N-1)(N+1)(N+3))`.
    pub fn render_factored(&self) -> String {
        if self.den.is_constant() && self.den.coeff(0).is_one() {
            return self.num.to_string();
        }
        let num_str = render_scaled_poly(&self.num);

        let mut rest = self.den.clone();
        let roots = rest.integer_roots(64);
        let mut factors: Vec<(i64, usize)> = Vec::new();
        for r in roots {
            rest = rest.div_exact(&Polynomial::linear_factor(r)).unwrap();
            match factors.last_mut() {
                Some((root, mult)) if *root == r => *mult += 1,
                _ => factors.push((r, 1)),
            }
        }
        let mut parts: Vec<String> = Vec::new();
        let rest_is_unit = rest.is_constant() && rest.coeff(0).is_one();
        if !rest_is_unit {
            if rest.is_constant() {
                parts.push(rest.to_string());
            } else if rest.coeffs().iter().filter(|c| !c.is_zero()).count() == 1 {
                parts.push(rest.to_string());
            } else {
                parts.push(format!("({rest})"));
            }
        }
        // Ascending constant terms, the usual typeset order (N-1)N(N+1)(N+3).
        for (r, mult) in factors.into_iter().rev() {
            let base = match r.cmp(&0) {
                std::cmp::Ordering::Equal => "N".to_string(),
                std::cmp::Ordering::Greater => format!("(N-{r})"),
                std::cmp::Ordering::Less => format!("(N+{})", -r),
            };
            if mult == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{mult}"));
            }
        }
        let bare = |s: &str| s == "N" || s.chars().all(|c| c.is_ascii_digit()) || (s.starts_with('(') && s.ends_with(')'));
        let den_str = if parts.len() == 1 && bare(&parts[0]) {
            parts.remove(0)
        } else {
            format!("({})", parts.concat())
        };
        format!("{num_str}/{den_str}")
    }
}

fn render_scaled_poly(p: &Polynomial) -> String {
    if p.is_constant() {
        return p.to_string();
    }
    let terms = p.coeffs().iter().filter(|c| !c.is_zero()).count();
    let mut content = p.content();
    if p.leading_coeff().is_some_and(Signed::is_negative) {
        content = -content;
    }
    let prim = p.div_scalar_exact(&content).unwrap();
    let inner = if terms == 1 { prim.to_string() } else { format!("({prim})") };
    if content.is_one() {
        inner
    } else if content == -BigInt::one() {
        format!("-{inner}")
    } else {
        format!("{content}{inner}")
    }
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_factored())
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction(({})/({}))", self.num, self.den)
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::reduce(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::reduce(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: RationalFunction) -> RationalFunction {
        &self + &rhs
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: RationalFunction) -> RationalFunction {
        &self - &rhs
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        &self * &rhs
    }
}

impl std::iter::Sum for RationalFunction {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(RationalFunction::zero(), |a, b| &a + &b)
    }
}

/// JSON shape: `{"num": ["c0","c1",...], "den": [...]}`, decimal strings ascending in `N`.
#[derive(Serialize, Deserialize)]
struct RationalJson {
    num: Vec<String>,
    den: Vec<String>,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let render = |p: &Polynomial| p.coeffs().iter().map(|c| c.to_str_radix(10)).collect();
        RationalJson { num: render(&self.num), den: render(&self.den) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RationalJson::deserialize(deserializer)?;
        let parse = |v: &[String]| -> Result<Polynomial, D::Error> {
            v.iter()
                .map(|s| s.parse::<BigInt>().map_err(|e| D::Error::custom(format!("bad coefficient {s:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()
                .map(Polynomial::from_coeffs)
        };
        RationalFunction::new(parse(&raw.num)?, parse(&raw.den)?).map_err(D::Error::custom)
    }
}

/// Least common multiple of two polynomials in Z[N].
pub(crate) fn poly_lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let g = a.gcd(b);
    let l = (a * b).div_exact(&g).expect("gcd divides product");
    match l.leading_coeff() {
        Some(c) if c.is_negative() => -l,
        _ => l,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64s(c)
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn inverse_n_doubles() {
        let a = rf(&[1], &[0, 1]);
        assert_eq!(&a + &a, rf(&[2], &[0, 1]));
    }

    #[test]
    fn self_difference_is_zero() {
        // (N+2)/(N(N+1)(N+3))
        let den = &(&p(&[0, 1]) * &p(&[1, 1])) * &p(&[3, 1]);
        let a = RationalFunction::new(p(&[2, 1]), den).unwrap();
        assert!((&a - &a).is_zero());
        assert_eq!(&a - &a, RationalFunction::zero());
    }

    #[test]
    fn cue_k2_recursion_identity() {
        // N/(N^2-1) - 1/(N(N^2-1)) = 1/N, checked against hand expansion:
        // (N^2 - 1)/(N(N^2-1)).
        let a = rf(&[0, 1], &[-1, 0, 1]);
        let b = rf(&[1], &[0, -1, 0, 1]);
        assert_eq!(&a - &b, rf(&[1], &[0, 1]));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(RationalFunction::new(p(&[1]), Polynomial::zero()), Err(AlgError::DivisionByZero));
        assert_eq!(rf(&[1], &[0, 1]).checked_div(&RationalFunction::zero()), Err(AlgError::DivisionByZero));
    }

    #[test]
    fn canonical_sign_and_content() {
        let a = rf(&[-2, -4], &[-6, 0, -2]);
        assert_eq!(a.numer(), &p(&[1, 2]));
        assert_eq!(a.denom(), &p(&[3, 0, 1]));
    }

    #[test]
    fn pole_reported() {
        let a = rf(&[1], &[-1, 1]);
        assert!(matches!(a.eval(&BigInt::from(1)), Err(AlgError::PoleAt(_))));
        assert_eq!(a.eval(&BigInt::from(3)).unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn factored_rendering() {
        let den = &(&p(&[0, 1]) * &p(&[1, 1])) * &p(&[3, 1]);
        let a = RationalFunction::new(p(&[-1]), den).unwrap();
        assert_eq!(a.to_string(), "-1/(N(N+1)(N+3))");
        assert_eq!(rf(&[1], &[0, 1]).to_string(), "1/N");
        assert_eq!(rf(&[1], &[1, 1]).to_string(), "1/(N+1)");
        let m3_den = &(&p(&[-1, 1]) * &p(&[1, 1])) * &p(&[3, 1]);
        let m3 = RationalFunction::new(p(&[-6, -3, 9, 3]), m3_den).unwrap();
        assert_eq!(m3.to_string(), "3(N^3+3N^2-N-2)/((N-1)(N+1)(N+3))");
        assert_eq!(RationalFunction::from_int(2).to_string(), "2");
    }

    #[test]
    fn json_shape() {
        let a = rf(&[-1], &[0, 3, 4, 1]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"num":["-1"],"den":["0","3","4","1"]}"#);
        let back: RationalFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
