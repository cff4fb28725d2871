//! Truncated Euler products for the mean-value constants
//!
//!   P(s) = prod_P (1 - 1/((|P|+1)|P|^s)),   c(2) = prod_P (1 - |P|^-2 - |P|^-5 + |P|^-6),
//!
//! evaluated over degree blocks: every factor depends only on |P| = q^n, so
//! the degree-n block is one factor raised to I_q(n).
//!
//! Tail majorant. Let x_n be the amount subtracted from 1 in the degree-n
//! factor. For every n >= 1 and q >= 3:
//!
//!   P(s): x_n = 1/((q^n+1) q^(ns)) < q^(-n(s+1)) <= 1/27
//!   c(2): x_n = q^(-2n) + q^(-5n) - q^(-6n) <= 2 q^(-2n) <= 2/9
//!
//! so 0 < x_n <= 1/2 and 0 <= -log(1 - x_n) <= 2 x_n. With I_q(n) <= q^n / n
//! and 1/n <= 1/(N+1) for n > N, the log of the omitted blocks is bounded by
//!
//!   P(s): sum_{n>N} (2/n) q^(-ns) <= 2/(N+1) * q^(-(N+1)s) / (1 - q^-s)
//!   c(2): sum_{n>N} (4/n) q^(-n)  <= 4/(N+1) * q^(-(N+1))  / (1 - q^-1)
//!
//! Call that bound L. Every omitted factor lies in (0, 1), so the full
//! product is e^(-L') times the truncation with 0 <= L' <= L, and
//! 0 <= 1 - full/truncated <= 1 - e^(-L) <= L.
//!
//! Blocks whose exact power would be enormous are evaluated with each
//! multiplication rounded down to ROUND_BITS significant bits, u = 2^(1-ROUND_BITS).
//! Each rounding multiplies by a factor in [1-u, 1], and squaring doubles the
//! weight of earlier roundings, so the computed v satisfies
//! v >= truncated (1-u)^W >= truncated (1 - W u) with W the weighted count
//! tracked below. For W u <= 1/2: v <= truncated <= v (1 + W 2^(2-ROUND_BITS)).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::lfunc::zeta_a;
use crate::poly::{irreducible_count, q_pow};
use crate::rational::{from_f64, int, ratio, round_down, size_bits, Rational};

const ROUND_BITS: u64 = 384;
const EXACT_BITS: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    /// P(s), the constant for monic discriminants.
    P(u32),
    /// c(2), the constant for all squarefree discriminants.
    C2,
}

impl ProductKind {
    pub fn exponent(&self) -> u32 {
        match self {
            ProductKind::P(s) => *s,
            ProductKind::C2 => 2,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ProductKind::P(s) => format!("P({s})"),
            ProductKind::C2 => "c(2)".to_string(),
        }
    }

    /// The factor shared by every irreducible of degree n.
    pub fn factor(&self, spec: FieldSpec, n: u32) -> Rational {
        let qn = q_pow(spec, n);
        match self {
            ProductKind::P(s) => {
                Rational::one() - ratio(1, (qn.clone() + 1) * num_traits::pow(qn, *s as usize))
            }
            ProductKind::C2 => {
                let x = ratio(1, qn);
                let p = |e: usize| num_traits::pow(x.clone(), e);
                Rational::one() - p(2) - p(5) + p(6)
            }
        }
    }

    /// The majorant L for the blocks of degree > n (see module docs).
    pub fn tail_majorant(&self, spec: FieldSpec, n: usize) -> Rational {
        let (num, e) = match self {
            ProductKind::P(s) => (2, *s),
            ProductKind::C2 => (4, 1),
        };
        let qe = q_pow(spec, e);
        let first = ratio(1, num_traits::pow(qe.clone(), n + 1));
        ratio(num, n as u64 + 1) * first / (Rational::one() - ratio(1, qe))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedProduct {
    pub kind: ProductKind,
    pub q: u32,
    /// Product over irreducibles of degree <= n.
    pub value: Rational,
    pub n: usize,
    /// Majorant of 1 - full/truncated.
    pub truncation_bound: Rational,
    /// Majorant of truncated/value - 1 from rounded blocks (zero when exact).
    pub rounding_bound: Rational,
    /// Majorant of |full/value - 1|.
    pub tail_bound: Rational,
}

impl TruncatedProduct {
    pub fn s(&self) -> u32 {
        self.kind.exponent()
    }

    pub fn is_exact(&self) -> bool {
        self.rounding_bound == Rational::default()
    }

    /// Interval guaranteed to contain the infinite product.
    pub fn enclosure(&self) -> (Rational, Rational) {
        let one = Rational::one();
        (
            self.value.clone() * (one.clone() - &self.truncation_bound),
            self.value.clone() * (one + &self.rounding_bound),
        )
    }
}

/// Successive truncations N = 0, 1, 2, ...
pub struct Truncations {
    spec: FieldSpec,
    kind: ProductKind,
    next_n: usize,
    value: Rational,
    weight: BigUint,
}

pub fn truncations(spec: FieldSpec, kind: ProductKind) -> Truncations {
    Truncations { spec, kind, next_n: 0, value: Rational::one(), weight: BigUint::default() }
}

/// `base^e` rounded down, with the weighted rounding count of the result.
fn pow_rounded(base: &Rational, e: &BigUint) -> (Rational, BigUint) {
    let mut acc = Rational::one();
    let mut weight = BigUint::default();
    for i in (0..e.bits()).rev() {
        acc = round_down(&(acc.clone() * &acc), ROUND_BITS);
        weight = weight * 2u32 + 1u32;
        if e.bit(i) {
            acc = round_down(&(acc * base), ROUND_BITS);
            weight += 1u32;
        }
    }
    (acc, weight)
}

impl Iterator for Truncations {
    type Item = TruncatedProduct;

    fn next(&mut self) -> Option<TruncatedProduct> {
        let n = self.next_n;
        if n > 0 {
            let f = self.kind.factor(self.spec, n as u32);
            let count = irreducible_count(self.spec, n as i64).unwrap();
            let exponent = count.to_biguint().unwrap();
            let small = exponent.to_u64().filter(|&e| e.saturating_mul(size_bits(&f)) <= EXACT_BITS);
            let exact_so_far = self.weight.bits() == 0;
            let block = match small {
                Some(e) if exact_so_far => num_traits::pow(f, e as usize),
                _ => {
                    let (b, w) = pow_rounded(&f, &exponent);
                    self.weight += w;
                    b
                }
            };
            self.value *= block;
            if self.weight.bits() > 0 || size_bits(&self.value) > EXACT_BITS {
                self.value = round_down(&self.value, ROUND_BITS);
                self.weight += 1u32;
            }
        }
        self.next_n += 1;
        let truncation_bound = self.kind.tail_majorant(self.spec, n);
        let rounding_bound = if self.weight.bits() == 0 {
            Rational::default()
        } else {
            let w = Rational::from_integer(BigInt::from(self.weight.clone()));
            assert!(w.clone() * ratio(1, BigInt::one() << (ROUND_BITS - 1)) <= ratio(1, 2));
            w * ratio(1, BigInt::one() << (ROUND_BITS - 2))
        };
        Some(TruncatedProduct {
            kind: self.kind,
            q: self.spec.q(),
            value: self.value.clone(),
            n,
            tail_bound: truncation_bound.clone() + &rounding_bound,
            truncation_bound,
            rounding_bound,
        })
    }
}

pub fn truncated(spec: FieldSpec, kind: ProductKind, n: usize) -> TruncatedProduct {
    truncations(spec, kind).nth(n).unwrap()
}

fn rel_err_rational(rel_err: f64) -> Result<Rational> {
    if rel_err.is_nan() || rel_err <= 0.0 || rel_err.is_infinite() {
        return Err(Error::InvalidArgument(format!("relative error must be positive, got {rel_err}")));
    }
    Ok(from_f64(rel_err).unwrap())
}

/// Smallest truncation whose tail bound is below `rel_err`.
pub fn to_precision(spec: FieldSpec, kind: ProductKind, rel_err: f64) -> Result<TruncatedProduct> {
    let target = rel_err_rational(rel_err)?;
    Ok(truncations(spec, kind).find(|t| t.tail_bound < target).unwrap())
}

pub fn euler_p(spec: FieldSpec, s: u32, rel_err: f64) -> Result<TruncatedProduct> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!("P(s) needs s >= 2, got {s}")));
    }
    to_precision(spec, ProductKind::P(s), rel_err)
}

pub fn euler_c2(spec: FieldSpec, rel_err: f64) -> Result<TruncatedProduct> {
    to_precision(spec, ProductKind::C2, rel_err)
}

/// A value known up to a relative error: the true value is value * (1 + d), |d| <= rel_err.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approx {
    pub value: Rational,
    pub rel_err: Rational,
}

impl Approx {
    pub fn interval(&self) -> (Rational, Rational) {
        let one = Rational::one();
        (self.value.clone() * (one.clone() - &self.rel_err), self.value.clone() * (one + &self.rel_err))
    }

    /// True when the two enclosures are disjoint.
    pub fn provably_differs(&self, other: &Approx) -> bool {
        let (a_lo, a_hi) = self.interval();
        let (b_lo, b_hi) = other.interval();
        a_hi < b_lo || b_hi < a_lo
    }
}

/// zeta_A(4) P(4), the constant for monic discriminants.
pub fn monic_constant(spec: FieldSpec, rel_err: f64) -> Result<(Approx, TruncatedProduct)> {
    let p4 = euler_p(spec, 4, rel_err)?;
    let value = zeta_a(spec, 4)? * &p4.value;
    Ok((Approx { value, rel_err: p4.tail_bound.clone() }, p4))
}

/// zeta_A(2) zeta_A(4) c(2), the constant for all squarefree discriminants.
pub fn squarefree_constant(spec: FieldSpec, rel_err: f64) -> Result<(Approx, TruncatedProduct)> {
    let c2 = euler_c2(spec, rel_err)?;
    let value = zeta_a(spec, 2)? * zeta_a(spec, 4)? * &c2.value;
    Ok((Approx { value, rel_err: c2.tail_bound.clone() }, c2))
}

/// q^((3/2)(2g+1)) q^(-3/2) zeta_A(4) P(4) = q^(3g) zeta_A(4) P(4).
pub fn main_term_andrade(spec: FieldSpec, g: usize, rel_err: f64) -> Result<Approx> {
    let (c, _) = monic_constant(spec, rel_err)?;
    Ok(Approx { value: int(q_pow(spec, 3 * g as u32)) * c.value, rel_err: c.rel_err })
}

/// zeta_A(2) zeta_A(4) c(2) q^(-3/2) q^(3M/2) = zeta_A(2) zeta_A(4) c(2) q^(3(M-1)/2).
pub fn main_term_rosen(spec: FieldSpec, m: usize, rel_err: f64) -> Result<Approx> {
    if m.is_multiple_of(2) {
        return Err(Error::EvenDegree(m as i64));
    }
    let (c, _) = squarefree_constant(spec, rel_err)?;
    Ok(Approx { value: int(q_pow(spec, 3 * (m as u32 - 1) / 2)) * c.value, rel_err: c.rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::to_f64;
    use num_traits::Signed;

    fn k(q: u64) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    #[test]
    fn first_blocks_by_hand() {
        assert_eq!(truncated(k(3), ProductKind::P(4), 0).value, int(1));
        assert_eq!(truncated(k(3), ProductKind::C2, 0).value, int(1));
        let p = truncated(k(3), ProductKind::P(4), 1);
        assert_eq!(p.value, num_traits::pow(ratio(323, 324), 3));
        assert!(p.is_exact());
        // 1 - 1/9 - 1/243 + 1/729 = (729 - 81 - 3 + 1)/729
        assert_eq!(ProductKind::C2.factor(k(3), 1), ratio(646, 729));
        assert_eq!(truncated(k(3), ProductKind::C2, 1).value, num_traits::pow(ratio(646, 729), 3));
    }

    #[test]
    fn c2_factor_positive() {
        for q in [3, 5, 7] {
            for n in 1..=20 {
                assert!(ProductKind::C2.factor(k(q), n).is_positive());
            }
        }
    }

    #[test]
    fn exponent_identities() {
        // (3/2)(2g+1) - 3/2 = 3g and -3/2 + 3M/2 = 3(M-1)/2
        for g in 0..10i64 {
            assert_eq!(ratio(3, 2) * int(2 * g + 1) - ratio(3, 2), int(3 * g));
        }
        for m in (1..20i64).step_by(2) {
            assert_eq!(ratio(-3, 2) + ratio(3 * m, 2), int(3 * (m - 1) / 2));
        }
    }

    #[test]
    fn monotone_and_banded() {
        for q in [3, 5] {
            for kind in [ProductKind::P(2), ProductKind::P(4), ProductKind::C2] {
                let ts: Vec<_> = truncations(k(q), kind).take(13).collect();
                for w in ts.windows(2) {
                    assert!(w[1].value <= w[0].value, "{kind:?} q={q} n={}", w[1].n);
                }
                for t in &ts[1..] {
                    assert!(t.value > ratio(1, 2) && t.value < int(1));
                }
            }
        }
    }

    #[test]
    fn tail_bound_brackets_later_truncations() {
        for q in [3, 5] {
            for kind in [ProductKind::P(4), ProductKind::C2] {
                let ts: Vec<_> = truncations(k(q), kind).take(13).collect();
                for n in 0..=8 {
                    let rel = (ts[n].value.clone() - &ts[n + 4].value).abs() / &ts[n].value;
                    assert!(rel < ts[n].tail_bound, "{kind:?} q={q} n={n}");
                }
            }
        }
    }

    #[test]
    fn precision_targets() {
        let p = euler_p(k(3), 4, 1e-12).unwrap();
        assert!(p.tail_bound < from_f64(1e-12).unwrap());
        assert!(p.is_exact());
        let next = truncated(k(3), ProductKind::P(4), p.n + 1);
        assert!((p.value.clone() - next.value).abs() / &p.value < p.tail_bound);
        // minimality
        assert!(truncated(k(3), ProductKind::P(4), p.n - 1).tail_bound >= from_f64(1e-12).unwrap());

        let c = euler_c2(k(3), 1e-12).unwrap();
        assert!(c.tail_bound < from_f64(1e-12).unwrap());
        assert!(!c.is_exact());
        assert!(c.rounding_bound < ratio(1, BigInt::one() << 300));
        assert!(euler_p(k(3), 1, 1e-3).is_err());
        assert!(euler_c2(k(3), 0.0).is_err());
        assert!(euler_c2(k(3), -1.0).is_err());
    }

    #[test]
    fn rounded_blocks_track_exact_ones() {
        // same truncation computed exactly vs through the rounded path
        let spec = k(5);
        let kind = ProductKind::C2;
        let mut exact = Rational::one();
        for n in 1..=6u32 {
            let e = irreducible_count(spec, n as i64).unwrap().to_usize().unwrap();
            exact *= num_traits::pow(kind.factor(spec, n), e);
        }
        let t = truncated(spec, kind, 6);
        assert!(t.value <= exact);
        assert!(exact.clone() <= t.value.clone() * (Rational::one() + &t.rounding_bound));
    }

    #[test]
    fn main_term_compositions() {
        let p4 = euler_p(k(3), 4, 1e-12).unwrap();
        let m = main_term_andrade(k(3), 1, 1e-12).unwrap();
        assert_eq!(m.value, int(27) * ratio(27, 26) * &p4.value);
        assert_eq!(main_term_andrade(k(3), 0, 1e-12).unwrap().value, ratio(27, 26) * &p4.value);

        let c2 = euler_c2(k(3), 1e-12).unwrap();
        let r = main_term_rosen(k(3), 3, 1e-12).unwrap();
        assert_eq!(r.value, ratio(3, 2) * ratio(27, 26) * &c2.value * int(27));
        let c2_5 = euler_c2(k(5), 1e-12).unwrap();
        let r5 = main_term_rosen(k(5), 1, 1e-12).unwrap();
        // zeta_A(4) = q^3/(q^3 - 1) = 125/124 at q = 5
        assert_eq!(r5.value, ratio(5, 4) * ratio(125, 124) * &c2_5.value);
        assert_eq!(main_term_rosen(k(3), 4, 1e-12).unwrap_err(), Error::EvenDegree(4));
    }

    #[test]
    fn constants_in_coarse_band() {
        for q in [3, 5] {
            let (a, _) = monic_constant(k(q), 1e-12).unwrap();
            let (b, _) = squarefree_constant(k(q), 1e-12).unwrap();
            for v in [to_f64(&a.value), to_f64(&b.value)] {
                assert!(v > 0.9 && v < 1.6, "{v}");
            }
        }
    }

    #[test]
    fn block_identity_between_the_two_products() {
        // 1 - x^2 - x^5 + x^6 = (1 - x^2)(1 - x^5/(1+x)) with x = q^-n, and
        // prod_P (1 - |P|^-2) = 1/zeta_A(2); the two constants coincide block by block.
        for q in [3, 5, 7] {
            for n in 1..=6 {
                let x = ratio(1, q_pow(k(q), n));
                let lhs = ProductKind::C2.factor(k(q), n);
                let rhs = (Rational::one() - x.clone() * &x) * ProductKind::P(4).factor(k(q), n);
                assert_eq!(lhs, rhs);
            }
        }
    }
}
