use super::ratfun::poly_lcm;
use super::{AlgError, Polynomial, RationalFunction};

/// Solve `a · x = b` exactly over rational functions of `N`.
///
/// Each row is first cleared of denominators, then the polynomial system is
/// reduced by Bareiss fraction-free elimination (every division is exact in
/// Z[N]), and the triangular result is back-substituted in the field.
pub fn solve_linear_system(a: &[Vec<RationalFunction>], b: &[RationalFunction]) -> Result<Vec<RationalFunction>, AlgError> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) || b.len() != n {
        return Err(AlgError::NotSquare);
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut m: Vec<Vec<Polynomial>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let lcm = row.iter().chain(std::iter::once(rhs)).fold(Polynomial::one(), |l, f| poly_lcm(&l, f.denom()));
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|f| {
                    let cofactor = lcm.div_exact(f.denom()).expect("lcm is a multiple of each denominator");
                    f.numer() * &cofactor
                })
                .collect()
        })
        .collect();

    let mut prev = Polynomial::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero()).ok_or(AlgError::SingularSystem)?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev).expect("Bareiss step divides exactly");
            }
            m[i][k] = Polynomial::zero();
        }
        prev = m[k][k].clone();
    }

    let mut x = vec![RationalFunction::zero(); n];
    for i in (0..n).rev() {
        let mut acc = RationalFunction::from_poly(m[i][n].clone());
        for j in i + 1..n {
            if !m[i][j].is_zero() {
                acc = &acc - &x[j].mul_poly(&m[i][j]);
            }
        }
        x[i] = acc.checked_div(&RationalFunction::from_poly(m[i][i].clone()))?;
    }
    Ok(x)
}
