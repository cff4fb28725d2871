//! L(s, chi_D) for odd-degree discriminants, the zeta function of A and
//! the K2 order q^(3g) L(2, chi_D).
//!
//! For deg D = 2g+1 the Dirichlet series collapses to the polynomial
//! sum_{n <= 2g} c_n q^(-ns) with c_n = sum_{deg f = n} chi_D(f).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{enumerate_monic, q_pow, MonicSieve, Poly};
use crate::rational::{int, ratio, Rational};
use crate::roots::poly_roots;
use crate::symbol::{kronecker, table_with_sieve};

/// How character values are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymbolPath {
    /// Multiplicative table over the smallest-irreducible-factor sieve.
    #[default]
    Sieve,
    /// One Euclidean symbol evaluation per polynomial.
    Euclid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPolynomial {
    spec: FieldSpec,
    discriminant: Option<Poly>,
    g: usize,
    coeffs: Vec<BigInt>,
}

impl LPolynomial {
    /// Bare coefficient list c_0..c_{2g}; the length must be odd.
    pub fn from_coeffs(spec: FieldSpec, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("need 2g+1 coefficients, got {}", coeffs.len())));
        }
        Ok(LPolynomial { spec, discriminant: None, g: coeffs.len() / 2, coeffs })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn discriminant(&self) -> Option<&Poly> {
        self.discriminant.as_ref()
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// L-polynomial of chi_{cD} = (c/.) chi_D: c_n picks up legendre(c)^n.
    pub fn twist(&self, c: FieldElement) -> Result<LPolynomial> {
        if c.is_zero() {
            return Err(Error::InvalidArgument("twist by zero".into()));
        }
        let s = c.legendre();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, x)| if s == -1 && n % 2 == 1 { -x } else { x.clone() })
            .collect();
        let discriminant = self.discriminant.as_ref().map(|d| d.scale(c.value()));
        Ok(LPolynomial { spec: self.spec, discriminant, g: self.g, coeffs })
    }
}

/// Validates D and returns g with deg D = 2g+1.
pub fn genus_of(d: &Poly) -> Result<usize> {
    if d.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !d.is_monic() {
        return Err(Error::NotMonic);
    }
    if d.deg() % 2 == 0 {
        return Err(Error::EvenDegree(d.deg()));
    }
    if !d.is_squarefree()? {
        return Err(Error::NotSquarefree);
    }
    Ok((d.deg() as usize - 1) / 2)
}

/// zeta_A(s) = (1 - q^(1-s))^(-1) = q^(s-1) / (q^(s-1) - 1).
pub fn zeta_a(spec: FieldSpec, s: i64) -> Result<Rational> {
    if s <= 1 {
        return Err(Error::InvalidArgument(format!("zeta_A has a pole at s=1; need s >= 2, got {s}")));
    }
    let t = q_pow(spec, (s - 1) as u32);
    Ok(Rational::new(t.clone(), t - 1))
}

pub fn l_polynomial(d: &Poly) -> Result<LPolynomial> {
    l_polynomial_with(d, SymbolPath::Sieve)
}

pub fn l_polynomial_with(d: &Poly, path: SymbolPath) -> Result<LPolynomial> {
    let g = genus_of(d)?;
    let sums = degree_sums(d, 2 * g + 2, path);
    // the series terminates at degree 2g
    if let Some((n, c)) = sums.iter().enumerate().skip(2 * g + 1).find(|(_, &c)| c != 0) {
        return Err(Error::InvalidArgument(format!("coefficient c_{n} = {c} should vanish for {d}")));
    }
    Ok(LPolynomial {
        spec: d.spec(),
        discriminant: Some(d.clone()),
        g,
        coeffs: sums[..=2 * g].iter().map(|&c| BigInt::from(c)).collect(),
    })
}

/// sum_{deg f = n} chi_D(f) for n = 0..=upto; D must be monic squarefree.
pub(crate) fn degree_sums(d: &Poly, upto: usize, path: SymbolPath) -> Vec<i64> {
    match path {
        SymbolPath::Sieve => {
            let table = table_with_sieve(d, MonicSieve::shared(d.spec(), upto));
            (0..=upto).map(|n| table.degree_sum(n)).collect()
        }
        SymbolPath::Euclid => (0..=upto)
            .map(|n| enumerate_monic(d.spec(), n).map(|f| kronecker(d, &f).unwrap() as i64).sum())
            .collect(),
    }
}

/// L-polynomial of an arbitrary squarefree odd-degree m = c D with D monic.
pub fn l_polynomial_any(m: &Poly) -> Result<LPolynomial> {
    if m.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (c, d) = m.monic_part();
    l_polynomial(&d)?.twist(c)
}

/// sum_n c_n q^(-sn)
pub fn l_value(l: &LPolynomial, s: u32) -> Rational {
    let base = ratio(1, q_pow(l.spec, s));
    let mut acc = Rational::zero();
    let mut w = Rational::one();
    for c in &l.coeffs {
        acc += w.clone() * int(c.clone());
        w *= &base;
    }
    acc
}

/// q^(3g) L(2, chi), checked to be a positive integer.
pub fn k2_from_lpoly(l: &LPolynomial) -> Result<BigInt> {
    let v = int(q_pow(l.spec, 3 * l.g as u32)) * l_value(l, 2);
    if !v.is_integer() || !v.is_positive() {
        return Err(Error::NonIntegral(crate::rational::exact_string(&v)));
    }
    Ok(v.to_integer())
}

/// #K2(O_D) = q^((3/2) deg D) q^(-3/2) L(2, chi_D) = q^(3g) L(2, chi_D).
pub fn k2_order(d: &Poly) -> Result<BigInt> {
    k2_from_lpoly(&l_polynomial(d)?)
}

/// Same formula for squarefree m of odd degree with any leading coefficient.
pub fn k2_order_any(m: &Poly) -> Result<BigInt> {
    k2_from_lpoly(&l_polynomial_any(m)?)
}

/// c_{2g-n} = q^(g-n) c_n for 0 <= n <= g.
pub fn fe_check(l: &LPolynomial) -> bool {
    let g = l.g;
    (0..=g).all(|n| l.coeffs[2 * g - n] == q_pow(l.spec, (g - n) as u32) * &l.coeffs[n])
}

/// Roots u of sum c_n u^n.
pub fn l_roots(l: &LPolynomial) -> Result<Vec<Complex64>> {
    // substitute u = v / sqrt(q) so the expected roots sit on the unit circle
    let sq = (l.spec.q() as f64).sqrt();
    let scaled: Vec<f64> = l
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| crate::rational::to_f64(&int(c.clone())) / sq.powi(n as i32))
        .collect();
    Ok(poly_roots(&scaled)?.into_iter().map(|v| v / sq).collect())
}

/// Every root has modulus q^(-1/2) within `tol`.
pub fn rh_check(l: &LPolynomial, tol: f64) -> Result<bool> {
    let target = (l.spec.q() as f64).sqrt().recip();
    Ok(l_roots(l)?.iter().all(|u| (u.norm() - target).abs() <= tol))
}
