//! Exact rationals and their rendering.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn pow_i(base: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// `n` or `n/d`.
pub fn exact_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the output of [`exact_string`].
pub fn parse_exact(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => Some(int(s.trim().parse::<BigInt>().ok()?)),
    }
}

/// Decimal rendering with `digits` fractional digits, rounded half away from zero.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let (whole, frac) = scaled.numer().div_rem(scaled.denom());
    let mut n = whole;
    if frac * 2 >= *scaled.denom() {
        n += 1;
    }
    let (ip, fp) = n.div_rem(&scale);
    let mut out = String::new();
    if neg && !(ip.is_zero() && fp.is_zero()) {
        out.push('-');
    }
    out.push_str(&ip.to_string());
    if digits > 0 {
        out.push('.');
        out.push_str(&format!("{:0>width$}", fp.to_string(), width = digits));
    }
    out
}

pub fn to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // rescale huge operands
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
    let n = if shift > 0 { r.numer() >> shift as usize } else { r.numer().clone() };
    let d = if shift > 0 { r.denom() >> shift as usize } else { r.denom().clone() };
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

/// Largest value with `bits` significant bits not exceeding the positive `r`.
/// The relative error is below 2^(1-bits).
pub fn round_down(r: &Rational, bits: u64) -> Rational {
    debug_assert!(r.is_positive());
    let e = r.numer().bits() as i64 - r.denom().bits() as i64;
    let shift = bits as i64 - e;
    let (n, d) = if shift >= 0 {
        (r.numer() << shift as usize, r.denom().clone())
    } else {
        (r.numer().clone(), r.denom() << (-shift) as usize)
    };
    let floor = n.div_floor(&d);
    let out = if shift >= 0 {
        Rational::new(floor, BigInt::one() << shift as usize)
    } else {
        Rational::from_integer(floor << (-shift) as usize)
    };
    debug_assert!(out.numer().sign() != Sign::Minus);
    out
}

/// Total bit size of numerator and denominator.
pub fn size_bits(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}
