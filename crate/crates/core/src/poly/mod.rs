//! The polynomial ring A = F_q[T].
//!
//! Polynomials are dense, ascending, and trimmed so the last coefficient is
//! nonzero; the zero polynomial is the empty coefficient vector. Binary
//! operations require both operands to live over the same field and panic
//! otherwise; [`poly_arith`] is the checked entry point.

mod enumerate;
mod factor;
mod parse;
mod sieve;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

pub use enumerate::{enumerate_h, enumerate_monic, h_count, irreducible_count, monic_count_upto, MonicIter};
pub use factor::{factor, irreducibles_of_degree, moebius, Factorization, Factorizer, TrialDivision};
pub use parse::parse_poly;
pub use sieve::MonicSieve;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    spec: FieldSpec,
    coeffs: Vec<u32>,
}

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl Poly {
    pub fn zero(spec: FieldSpec) -> Self {
        Poly { spec, coeffs: Vec::new() }
    }

    pub fn one(spec: FieldSpec) -> Self {
        Poly { spec, coeffs: vec![1] }
    }

    /// The indeterminate `T`.
    pub fn t(spec: FieldSpec) -> Self {
        Poly { spec, coeffs: vec![0, 1] }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_raw(c.spec(), vec![c.value()])
    }

    /// Ascending integer coefficients, each reduced mod q.
    pub fn from_coeffs(spec: FieldSpec, coeffs: &[i64]) -> Self {
        Self::from_raw(spec, coeffs.iter().map(|&c| spec.reduce(c)).collect())
    }

    pub fn from_elements(spec: FieldSpec, coeffs: &[FieldElement]) -> Result<Self> {
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.spec() != spec {
                return Err(Error::FieldMismatch { left: spec.q(), right: c.spec().q() });
            }
            raw.push(c.value());
        }
        Ok(Self::from_raw(spec, raw))
    }

    pub(crate) fn from_raw(spec: FieldSpec, mut coeffs: Vec<u32>) -> Self {
        trim(&mut coeffs);
        Poly { spec, coeffs }
    }

    /// `T^n`
    pub fn monomial(spec: FieldSpec, n: usize) -> Self {
        let mut c = vec![0; n + 1];
        c[n] = 1;
        Poly { spec, coeffs: c }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.spec.elem(self.coeffs.get(i).copied().unwrap_or(0) as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with -1 standing in for deg(0) = -inf.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> FieldElement {
        self.spec.elem(self.coeffs.last().copied().unwrap_or(0) as i64)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// |f| = q^deg f, |0| = 0.
    pub fn norm(&self) -> BigUint {
        match self.degree() {
            None => BigUint::default(),
            Some(d) => BigUint::from(self.spec.q()).pow(d as u32),
        }
    }

    fn same_field(&self, other: &Poly) {
        assert_eq!(self.spec, other.spec, "polynomials over different fields");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.same_field(other);
        let k = self.spec;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| {
                k.add(self.coeffs.get(i).copied().unwrap_or(0), other.coeffs.get(i).copied().unwrap_or(0))
            })
            .collect();
        Poly::from_raw(k, v)
    }

    pub fn neg(&self) -> Poly {
        let k = self.spec;
        Poly { spec: k, coeffs: self.coeffs.iter().map(|&c| k.neg(c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.same_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.spec);
        }
        Poly::from_raw(self.spec, mul_raw(self.spec, &self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, c: u32) -> Poly {
        let k = self.spec;
        Poly::from_raw(k, self.coeffs.iter().map(|&x| k.mul(x, c)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Monic associate together with the stripped leading coefficient.
    pub fn monic_part(&self) -> (FieldElement, Poly) {
        let lc = self.leading_coeff();
        if self.is_zero() || lc.value() == 1 {
            return (lc, self.clone());
        }
        (lc, self.scale(self.spec.inv(lc.value())))
    }

    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(divisor);
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = self.spec;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(k), self.clone()));
        }
        let inv = k.inv(*divisor.coeffs.last().unwrap());
        let mut r = self.coeffs.clone();
        let mut quot = vec![0u32; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = k.mul(r[i], inv);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                r[idx] = k.sub(r[idx], k.mul(c, dc));
            }
        }
        r.truncate(dd);
        Ok((Poly::from_raw(k, quot), Poly::from_raw(k, r)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        self.same_field(divisor);
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = self.coeffs.clone();
        rem_in_place(self.spec, &mut r, &divisor.coeffs);
        Ok(Poly::from_raw(self.spec, r))
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        match self.divmod(divisor) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn divides(&self, other: &Poly) -> bool {
        !self.is_zero() && other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.same_field(other);
        let mut a = self.coeffs.clone();
        let mut b = other.coeffs.clone();
        while !b.is_empty() {
            rem_in_place(self.spec, &mut a, &b);
            std::mem::swap(&mut a, &mut b);
        }
        Poly::from_raw(self.spec, a).monic_part().1
    }

    pub fn derivative(&self) -> Poly {
        let k = self.spec;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| k.mul(c, (i as u64 % k.q() as u64) as u32))
            .collect();
        Poly::from_raw(k, v)
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        assert_eq!(self.spec, x.spec(), "evaluation point over a different field");
        let k = self.spec;
        let v = self.coeffs.iter().rev().fold(0, |acc, &c| k.add(k.mul(acc, x.value()), c));
        k.elem(v as i64)
    }

    /// `self^e mod modulus` for a non-constant modulus.
    pub fn pow_mod(&self, e: &BigUint, modulus: &Poly) -> Poly {
        let k = self.spec;
        let mut base = self.coeffs.clone();
        rem_in_place(k, &mut base, &modulus.coeffs);
        let mut acc = vec![1u32];
        rem_in_place(k, &mut acc, &modulus.coeffs);
        for i in (0..e.bits()).rev() {
            acc = mulmod_raw(k, &acc, &acc, &modulus.coeffs);
            if e.bit(i) {
                acc = mulmod_raw(k, &acc, &base, &modulus.coeffs);
            }
        }
        Poly::from_raw(k, acc)
    }

    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_constant() {
            return Ok(true);
        }
        let d = self.derivative();
        // f' = 0 with deg f >= 1 means f is a p-th power, since Frobenius fixes F_p.
        if d.is_zero() {
            return Ok(false);
        }
        Ok(self.gcd(&d).is_one())
    }

    /// Ben-Or: f is irreducible iff gcd(T^(q^i) - T, f) = 1 for 1 <= i <= deg f / 2.
    pub fn is_irreducible(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let n = self.degree().unwrap();
        if n == 0 {
            return Err(Error::Constant);
        }
        let f = self.monic_part().1;
        let q = BigUint::from(self.spec.q());
        let t = Poly::t(self.spec);
        let mut h = t.rem(&f)?;
        for _ in 0..n / 2 {
            h = h.pow_mod(&q, &f);
            if !h.sub(&t).gcd(&f).is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff `self` is c * l^2 for a polynomial l.
    pub fn is_square_monic(&self) -> bool {
        if !self.is_monic() {
            return false;
        }
        factor(self).map(|fz| fz.factors().iter().all(|(_, e)| e % 2 == 0)).unwrap_or(false)
    }

    /// Position of a monic polynomial in degree-major, constant-coefficient-fastest order.
    pub fn monic_index(&self) -> Option<usize> {
        if !self.is_monic() {
            return None;
        }
        let q = self.spec.q() as usize;
        let d = self.coeffs.len() - 1;
        let mut idx = 0usize;
        for &c in self.coeffs[..d].iter().rev() {
            idx = idx * q + c as usize;
        }
        Some(monic_offset(q, d) + idx)
    }

    /// Inverse of [`Poly::monic_index`].
    pub fn from_monic_index(spec: FieldSpec, index: usize) -> Poly {
        let q = spec.q() as usize;
        let mut d = 0;
        while monic_offset(q, d + 1) <= index {
            d += 1;
        }
        Poly::monic_with_code(spec, d, index - monic_offset(q, d))
    }

    /// Monic degree-`d` polynomial whose lower coefficients are the base-q digits of `code`.
    pub fn monic_with_code(spec: FieldSpec, d: usize, mut code: usize) -> Poly {
        let q = spec.q() as usize;
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push((code % q) as u32);
            code /= q;
        }
        c.push(1);
        Poly { spec, coeffs: c }
    }
}

/// Number of monic polynomials of degree < d: 1 + q + ... + q^(d-1).
pub(crate) fn monic_offset(q: usize, d: usize) -> usize {
    (0..d).fold(0, |acc, _| acc * q + 1)
}

pub(crate) fn mul_raw(k: FieldSpec, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let q = k.q() as u64;
    let mut acc = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] += x as u64 * y as u64;
        }
        // keep the u64 accumulators far from overflow for large q
        if q > 1 << 12 {
            for v in acc.iter_mut() {
                *v %= q;
            }
        }
    }
    acc.into_iter().map(|v| (v % q) as u32).collect()
}

/// Reduce `a` modulo the nonzero trimmed polynomial `m`, leaving `a` trimmed.
pub(crate) fn rem_in_place(k: FieldSpec, a: &mut Vec<u32>, m: &[u32]) {
    trim(a);
    let dm = m.len() - 1;
    if a.len() <= dm {
        return;
    }
    let lead = *m.last().unwrap();
    let inv = if lead == 1 { 1 } else { k.inv(lead) };
    for i in (dm..a.len()).rev() {
        let c = if inv == 1 { a[i] } else { k.mul(a[i], inv) };
        if c == 0 {
            continue;
        }
        let base = i - dm;
        for (j, &mc) in m.iter().enumerate() {
            a[base + j] = k.sub(a[base + j], k.mul(c, mc));
        }
    }
    a.truncate(dm);
    trim(a);
}

fn mulmod_raw(k: FieldSpec, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    let mut p = mul_raw(k, a, b);
    rem_in_place(k, &mut p, m);
    p
}

/// Which ring operation [`poly_arith`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    DivMod,
    Mod,
    Gcd,
    /// Unary in `f`; `g` is ignored.
    Derivative,
    /// Evaluates `f` at the constant polynomial `g`.
    Eval,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyValue {
    Poly(Poly),
    Pair(Poly, Poly),
    Scalar(FieldElement),
}

/// Checked ring arithmetic over a shared field.
pub fn poly_arith(f: &Poly, g: &Poly, op: PolyOp) -> Result<PolyValue> {
    if f.spec != g.spec {
        return Err(Error::FieldMismatch { left: f.spec.q(), right: g.spec.q() });
    }
    Ok(match op {
        PolyOp::Add => PolyValue::Poly(f.add(g)),
        PolyOp::Sub => PolyValue::Poly(f.sub(g)),
        PolyOp::Mul => PolyValue::Poly(f.mul(g)),
        PolyOp::DivMod => {
            let (q, r) = f.divmod(g)?;
            PolyValue::Pair(q, r)
        }
        PolyOp::Mod => PolyValue::Poly(f.rem(g)?),
        PolyOp::Gcd => PolyValue::Poly(f.gcd(g)),
        PolyOp::Derivative => PolyValue::Poly(f.derivative()),
        PolyOp::Eval => {
            if !g.is_constant() {
                return Err(Error::InvalidArgument("evaluation point must be a constant".into()));
            }
            PolyValue::Scalar(f.eval(g.coeff(0)))
        }
    })
}

/// Expression form, descending degree, coefficients in [0, q).
pub fn format_poly(f: &Poly) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, &c) in f.coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push('+');
        }
        match (i, c) {
            (0, _) => out.push_str(&c.to_string()),
            (1, 1) => out.push('T'),
            (1, _) => out.push_str(&format!("{c}*T")),
            (_, 1) => out.push_str(&format!("T^{i}")),
            _ => out.push_str(&format!("{c}*T^{i}")),
        }
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", format_poly(self), self.spec)
    }
}

/// q^n as a big integer.
pub(crate) fn q_pow(spec: FieldSpec, n: u32) -> BigInt {
    let mut r = BigInt::one();
    for _ in 0..n {
        r *= spec.q();
    }
    r
}
