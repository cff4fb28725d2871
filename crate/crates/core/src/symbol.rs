//! The quadratic residue symbol (D/f) in F_q[T].
//!
//! For a monic irreducible P, (D/P) is D^((|P|-1)/2) mod P read in {-1, 0, 1};
//! the symbol extends completely multiplicatively in the monic bottom
//! argument. A nonzero constant top c gives (c/f) = legendre(c)^deg f.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{factor, rem_in_place, MonicSieve, Poly};

fn check_bottom(top: &Poly, bottom: &Poly) -> Result<()> {
    if top.spec() != bottom.spec() {
        return Err(Error::FieldMismatch { left: top.spec().q(), right: bottom.spec().q() });
    }
    if bottom.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !bottom.is_monic() {
        return Err(Error::NotMonic);
    }
    Ok(())
}

/// (c/f) = legendre(c)^deg f for monic f.
pub fn scalar_char(c: FieldElement, f: &Poly) -> Result<i8> {
    if c.spec() != f.spec() {
        return Err(Error::FieldMismatch { left: c.spec().q(), right: f.spec().q() });
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    Ok(scalar_sign(c.legendre(), f.deg() as usize))
}

#[inline]
fn scalar_sign(legendre: i8, deg: usize) -> i8 {
    match legendre {
        0 if deg == 0 => 1,
        0 => 0,
        1 => 1,
        _ => {
            if deg.is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
    }
}

/// Euclidean evaluation via quadratic reciprocity: for monic coprime a, b,
/// (a/b)(b/a) = (-1)^(((q-1)/2) deg a deg b).
pub fn kronecker(top: &Poly, bottom: &Poly) -> Result<i8> {
    check_bottom(top, bottom)?;
    Ok(kronecker_raw(top.spec(), top.coeffs().to_vec(), bottom.coeffs().to_vec()))
}

/// `bottom` must be monic and trimmed; `top` is arbitrary.
pub(crate) fn kronecker_raw(k: FieldSpec, mut a: Vec<u32>, mut b: Vec<u32>) -> i8 {
    let half_odd = k.half_order() % 2 == 1;
    let mut sign = 1i8;
    loop {
        let db = b.len() - 1;
        if db == 0 {
            return sign;
        }
        rem_in_place(k, &mut a, &b);
        if a.is_empty() {
            return 0;
        }
        // peel the leading coefficient so both arguments are monic
        let lc = *a.last().unwrap();
        if lc != 1 {
            if db % 2 == 1 && k.legendre(lc) == -1 {
                sign = -sign;
            }
            let inv = k.inv(lc);
            for c in a.iter_mut() {
                *c = k.mul(*c, inv);
            }
        }
        let da = a.len() - 1;
        if half_odd && da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut b);
    }
}

/// Definitional route: factor the bottom and evaluate each prime symbol by
/// exponentiation in A/P.
pub fn kronecker_oracle(top: &Poly, bottom: &Poly) -> Result<i8> {
    check_bottom(top, bottom)?;
    let mut result = 1i8;
    for (p, e) in factor(bottom)?.factors() {
        let s = prime_symbol(top, p);
        if s == 0 {
            return Ok(0);
        }
        if e % 2 == 1 {
            result *= s;
        }
    }
    Ok(result)
}

fn prime_symbol(top: &Poly, p: &Poly) -> i8 {
    let r = top.rem(p).unwrap();
    if r.is_zero() {
        return 0;
    }
    let exp = (p.norm() - BigUint::from(1u32)) >> 1;
    let v = r.pow_mod(&exp, p);
    let q = p.spec().q();
    match v.coeffs() {
        [1] => 1,
        [c] if *c == q - 1 => -1,
        other => unreachable!("Euler criterion produced {other:?} modulo an irreducible"),
    }
}

/// chi_D(f) for every monic f with deg f <= max_degree, indexed like
/// [`MonicSieve`].
#[derive(Debug, Clone)]
pub struct CharTable {
    discriminant: Poly,
    max_degree: usize,
    values: Vec<i8>,
    sieve: Arc<MonicSieve>,
}

impl CharTable {
    pub fn discriminant(&self) -> &Poly {
        &self.discriminant
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn sieve(&self) -> &Arc<MonicSieve> {
        &self.sieve
    }

    #[inline]
    pub fn at(&self, index: usize) -> i8 {
        self.values[index]
    }

    /// `None` for non-monic f or f beyond the table degree.
    pub fn get(&self, f: &Poly) -> Option<i8> {
        self.sieve.index_of(f).map(|i| self.values[i])
    }

    /// Sum of chi_D(f) over monic f of degree exactly n.
    pub fn degree_sum(&self, n: usize) -> i64 {
        self.values[self.sieve.degree_range(n)].iter().map(|&v| v as i64).sum()
    }
}

/// Evaluate the symbol on irreducibles only and extend multiplicatively
/// along the smallest-irreducible-factor table.
pub fn build_char_table(d: &Poly, max_degree: usize) -> Result<CharTable> {
    if d.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !d.is_monic() {
        return Err(Error::NotMonic);
    }
    if !d.is_squarefree()? {
        return Err(Error::NotSquarefree);
    }
    let sieve = MonicSieve::shared(d.spec(), max_degree);
    Ok(table_with_sieve(d, sieve))
}

pub(crate) fn table_with_sieve(d: &Poly, sieve: Arc<MonicSieve>) -> CharTable {
    let spec = d.spec();
    let mut values = vec![0i8; sieve.len()];
    if !values.is_empty() {
        values[0] = 1;
    }
    for i in 1..values.len() {
        values[i] = match sieve.split(i) {
            Some((p, _)) if p == i => {
                kronecker_raw(spec, d.coeffs().to_vec(), sieve.poly(i).coeffs().to_vec())
            }
            Some((p, c)) => values[p] * values[c],
            None => unreachable!(),
        };
    }
    CharTable { discriminant: d.clone(), max_degree: sieve.max_degree(), values, sieve }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{enumerate_h, enumerate_monic, parse_poly};
    use proptest::prelude::*;

    fn k(q: u64) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    fn p(q: u64, s: &str) -> Poly {
        parse_poly(s, k(q)).unwrap()
    }

    /// Every polynomial (including zero and non-monic) of degree <= n.
    fn all_polys(spec: FieldSpec, n: usize) -> Vec<Poly> {
        let q = spec.q() as usize;
        (0..q.pow(n as u32 + 1))
            .map(|mut code| {
                let mut c = Vec::new();
                for _ in 0..=n {
                    c.push((code % q) as i64);
                    code /= q;
                }
                Poly::from_coeffs(spec, &c)
            })
            .collect()
    }

    fn monic_upto(spec: FieldSpec, n: usize) -> Vec<Poly> {
        (0..=n).flat_map(|d| enumerate_monic(spec, d)).collect()
    }

    #[test]
    fn kronecker_examples() {
        for sym in [kronecker, kronecker_oracle] {
            assert_eq!(sym(&p(3, "T^2+2"), &p(3, "1")).unwrap(), 1);
            assert_eq!(sym(&p(3, "T"), &p(3, "T+1")).unwrap(), -1);
            assert_eq!(sym(&p(3, "T"), &p(3, "T")).unwrap(), 0);
            assert_eq!(sym(&p(3, "T+1"), &p(3, "T^2")).unwrap(), 1);
            assert_eq!(sym(&p(5, "2"), &p(5, "T")).unwrap(), -1);
        }
    }

    #[test]
    fn zero_top_conventions() {
        assert_eq!(kronecker(&p(3, "0"), &p(3, "1")).unwrap(), 1);
        assert_eq!(kronecker(&p(3, "0"), &p(3, "T")).unwrap(), 0);
        assert_eq!(kronecker_oracle(&p(3, "0"), &p(3, "1")).unwrap(), 1);
    }

    #[test]
    fn bottom_must_be_monic_nonzero() {
        assert_eq!(kronecker(&p(3, "T"), &p(3, "2*T")), Err(Error::NotMonic));
        assert_eq!(kronecker(&p(3, "T"), &p(3, "0")), Err(Error::ZeroPolynomial));
        assert_eq!(kronecker_oracle(&p(3, "T"), &p(3, "2")), Err(Error::NotMonic));
        assert!(matches!(kronecker(&p(3, "T"), &p(5, "T")), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn scalar_char_examples() {
        let f3 = k(3);
        assert_eq!(scalar_char(f3.elem(1), &p(3, "T^3+T")).unwrap(), 1);
        assert_eq!(scalar_char(f3.elem(2), &p(3, "T")).unwrap(), -1);
        assert_eq!(scalar_char(f3.elem(2), &p(3, "T^2+1")).unwrap(), 1);
        assert_eq!(scalar_char(f3.elem(0), &p(3, "T")).unwrap(), 0);
        assert_eq!(scalar_char(f3.elem(2), &p(3, "2*T")), Err(Error::NotMonic));
        // the scalar rule agrees with the symbol for constant tops
        for f in monic_upto(f3, 3) {
            for c in f3.elements() {
                assert_eq!(scalar_char(c, &f).unwrap(), kronecker(&Poly::constant(c), &f).unwrap());
            }
        }
    }

    #[test]
    fn euclid_matches_oracle_small() {
        let f5 = k(5);
        let bottoms = monic_upto(f5, 3);
        for top in all_polys(f5, 2) {
            for b in &bottoms {
                assert_eq!(
                    kronecker(&top, b).unwrap(),
                    kronecker_oracle(&top, b).unwrap(),
                    "{top:?} / {b:?}"
                );
            }
        }
    }

    #[test]
    fn bottom_multiplicativity() {
        let f3 = k(3);
        let small = monic_upto(f3, 3);
        for d in all_polys(f3, 3) {
            for f in &small {
                for g in &small {
                    let lhs = kronecker(&d, &f.mul(g)).unwrap();
                    assert_eq!(lhs, kronecker(&d, f).unwrap() * kronecker(&d, g).unwrap());
                }
            }
        }
    }

    #[test]
    fn reciprocity_exhaustive() {
        for q in [3, 5] {
            let spec = k(q);
            let polys = monic_upto(spec, if q == 3 { 4 } else { 3 });
            for a in &polys {
                for b in &polys {
                    if !a.gcd(b).is_one() {
                        continue;
                    }
                    let lhs = kronecker(a, b).unwrap() * kronecker(b, a).unwrap();
                    let e = spec.half_order() as i64 * a.deg() * b.deg();
                    assert_eq!(lhs, if e % 2 == 0 { 1 } else { -1 });
                }
            }
        }
    }

    fn arb(q: u64, n: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(0..q as i64, 0..=n + 1).prop_map(move |c| Poly::from_coeffs(k(q), &c))
    }

    proptest! {
        #[test]
        fn top_periodicity(d in arb(3, 4), h in arb(3, 4), code in 1usize..121) {
            let f = Poly::from_monic_index(k(3), code);
            let shifted = d.add(&h.mul(&f));
            prop_assert_eq!(kronecker(&d, &f).unwrap(), kronecker(&shifted, &f).unwrap());
        }

        #[test]
        fn fast_path_matches_oracle(top in arb(7, 6), code in 0usize..2801) {
            let f = Poly::from_monic_index(k(7), code);
            prop_assert_eq!(kronecker(&top, &f).unwrap(), kronecker_oracle(&top, &f).unwrap());
        }
    }

    #[test]
    fn table_small_example() {
        let d = p(3, "T^3+2*T+1");
        let t = build_char_table(&d, 2).unwrap();
        assert_eq!(t.len(), 13);
        assert_eq!(t.at(0), 1);
        assert_eq!(t.get(&p(3, "1")), Some(1));
        for f in monic_upto(k(3), 2) {
            assert_eq!(t.get(&f).unwrap(), kronecker(&d, &f).unwrap());
        }
        assert_eq!(t.get(&p(3, "T^3")), None);
        assert_eq!(t.get(&p(3, "2*T")), None);
    }

    #[test]
    fn table_rejects_bad_discriminants() {
        assert_eq!(build_char_table(&p(3, "T^2"), 2).unwrap_err(), Error::NotSquarefree);
        assert_eq!(build_char_table(&p(3, "2*T"), 2).unwrap_err(), Error::NotMonic);
        assert_eq!(build_char_table(&p(3, "0"), 2).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn table_matches_fast_path_and_is_multiplicative() {
        for q in [3u64, 5] {
            for g in [1usize, 2] {
                let fam: Vec<Poly> = enumerate_h(k(q), g).collect();
                // ten discriminants spread across the family
                for d in fam.iter().step_by(fam.len() / 10).take(10) {
                    let n = 2 * g + 1;
                    let t = build_char_table(d, n).unwrap();
                    let s = t.sieve().clone();
                    for i in 0..t.len() {
                        assert_eq!(t.at(i), kronecker(d, &s.poly(i)).unwrap());
                    }
                    for i in s.degree_range(1).chain(s.degree_range(2)) {
                        for j in 0..s.degree_range(n - 2).end {
                            let prod = s.poly(i).mul(&s.poly(j));
                            if let Some(v) = t.get(&prod) {
                                assert_eq!(v, t.at(i) * t.at(j));
                            }
                        }
                    }
                }
            }
        }
    }
}
