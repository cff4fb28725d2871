use num_bigint::BigInt;
use num_traits::Zero;

use super::{q_pow, Poly};
use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Monic polynomials of one degree, lexicographic on the coefficient tuple
/// with the constant coefficient varying fastest.
pub struct MonicIter {
    spec: FieldSpec,
    degree: usize,
    next: usize,
    total: usize,
}

impl Iterator for MonicIter {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.next >= self.total {
            return None;
        }
        let f = Poly::monic_with_code(self.spec, self.degree, self.next);
        self.next += 1;
        Some(f)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.total - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MonicIter {}

pub fn enumerate_monic(spec: FieldSpec, n: usize) -> MonicIter {
    let total = (spec.q() as usize).checked_pow(n as u32).expect("degree too large to enumerate");
    MonicIter { spec, degree: n, next: 0, total }
}

/// Monic polynomials of degree at most `n`.
pub fn monic_count_upto(spec: FieldSpec, n: usize) -> usize {
    super::monic_offset(spec.q() as usize, n + 1)
}

/// The family H: monic squarefree polynomials of degree 2g+1.
pub fn enumerate_h(spec: FieldSpec, g: usize) -> impl Iterator<Item = Poly> {
    enumerate_monic(spec, 2 * g + 1).filter(|f| f.is_squarefree().unwrap())
}

/// #H = q^(2g+1) - q^(2g) for g >= 1 and q for g = 0.
pub fn h_count(spec: FieldSpec, g: usize) -> BigInt {
    let n = 2 * g as u32 + 1;
    if g == 0 {
        BigInt::from(spec.q())
    } else {
        q_pow(spec, n) - q_pow(spec, n - 1)
    }
}

/// Number of monic irreducibles of degree n, (1/n) sum_{d | n} mu(d) q^(n/d).
pub fn irreducible_count(spec: FieldSpec, n: i64) -> Result<BigInt> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("degree {n} must be positive")));
    }
    let n = n as u32;
    let mut total = BigInt::zero();
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        match int_moebius(d) {
            0 => {}
            m => total += q_pow(spec, n / d) * m,
        }
    }
    Ok(total / n)
}

fn int_moebius(mut n: u32) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}
