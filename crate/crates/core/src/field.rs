//! The prime field F_q for odd prime q.

use std::fmt;

use crate::error::{Error, Result};

/// An odd prime field size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    q: u32,
}

impl FieldSpec {
    /// Checks primality by trial division; q is desk-scale.
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || q.is_multiple_of(2) || q > u16::MAX as u64 {
            return Err(Error::NotOddPrime(q));
        }
        let mut d = 3;
        while d * d <= q {
            if q.is_multiple_of(d) {
                return Err(Error::NotOddPrime(q));
            }
            d += 2;
        }
        Ok(FieldSpec { q: q as u32 })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// (q-1)/2
    #[inline]
    pub fn half_order(&self) -> u32 {
        (self.q - 1) / 2
    }

    pub fn elem(&self, v: i64) -> FieldElement {
        FieldElement { value: self.reduce(v), spec: *self }
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| FieldElement { value: v, spec: *self })
    }

    #[inline]
    pub(crate) fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    // Raw residue helpers used by the polynomial kernels.
    #[inline]
    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub(crate) fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub(crate) fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.q;
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue via Fermat.
    #[inline]
    pub(crate) fn inv(&self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.q));
        self.pow(a, self.q as u64 - 2)
    }

    /// Quadratic character of a raw residue.
    pub(crate) fn legendre(&self, a: u32) -> i8 {
        match self.pow(a, self.half_order() as u64) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// A canonical residue in `[0, q)` tagged with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    spec: FieldSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
    /// `b` is read as a non-negative exponent.
    Pow,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch { left: self.spec.q, right: other.spec.q });
        }
        Ok(())
    }

    pub fn arith(&self, other: &FieldElement, kind: ArithKind) -> Result<FieldElement> {
        self.check(other)?;
        let s = self.spec;
        let value = match kind {
            ArithKind::Add => s.add(self.value, other.value),
            ArithKind::Sub => s.sub(self.value, other.value),
            ArithKind::Mul => s.mul(self.value, other.value),
            ArithKind::Div => {
                if other.value == 0 {
                    return Err(Error::DivisionByZero);
                }
                s.mul(self.value, s.inv(other.value))
            }
            ArithKind::Pow => s.pow(self.value, other.value as u64),
        };
        Ok(FieldElement { value, spec: s })
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        FieldElement { value: self.spec.pow(self.value, e), spec: self.spec }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement { value: self.spec.inv(self.value), spec: self.spec })
    }

    /// c^((q-1)/2) mapped to {-1, 0, +1}.
    pub fn legendre(&self) -> i8 {
        self.spec.legendre(self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Free-function form of [`FieldElement::legendre`].
pub fn legendre_const(c: &FieldElement) -> i8 {
    c.legendre()
}
