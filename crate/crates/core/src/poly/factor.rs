use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{enumerate_monic, Poly};
use crate::error::{Error, Result};
use crate::field::FieldElement;

/// unit * prod P_i^e_i with distinct monic irreducible P_i, sorted by monic index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    unit: FieldElement,
    factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn unit(&self) -> FieldElement {
        self.unit
    }

    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    pub fn expand(&self) -> Poly {
        let mut acc = Poly::constant(self.unit);
        for (p, e) in &self.factors {
            acc = acc.mul(&p.pow(*e));
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }
}

/// Factorization strategy.
pub trait Factorizer {
    fn factor(&self, f: &Poly) -> Result<Factorization>;
}

/// Trial division by monic irreducibles in degree order, drawn from a
/// process-wide cache.
#[derive(Debug, Default, Clone, Copy)]
pub struct TrialDivision;

impl Factorizer for TrialDivision {
    fn factor(&self, f: &Poly) -> Result<Factorization> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let spec = f.spec();
        let (unit, mut rest) = f.monic_part();
        let mut factors = Vec::new();
        let mut d = 1;
        while 2 * d <= rest.deg() as usize {
            for p in irreducibles_of_degree(spec, d).iter() {
                let mut e = 0;
                while let Some(next) = rest.div_exact(p) {
                    rest = next;
                    e += 1;
                }
                if e > 0 {
                    factors.push((p.clone(), e));
                }
                if 2 * d > rest.deg() as usize {
                    break;
                }
            }
            d += 1;
        }
        if rest.deg() >= 1 {
            // no factor of degree <= deg/2 remains, so the cofactor is irreducible
            factors.push((rest, 1));
        }
        factors.sort_by_key(|(p, _)| p.monic_index());
        Ok(Factorization { unit, factors })
    }
}

type IrrCache = Mutex<HashMap<(u32, usize), Arc<Vec<Poly>>>>;

/// All monic irreducibles of degree `d` in enumeration order, memoized per (q, d).
pub fn irreducibles_of_degree(spec: crate::field::FieldSpec, d: usize) -> Arc<Vec<Poly>> {
    static CACHE: OnceLock<IrrCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(spec.q(), d)) {
        return v.clone();
    }
    let list: Arc<Vec<Poly>> =
        Arc::new(enumerate_monic(spec, d).filter(|f| f.is_irreducible().unwrap()).collect());
    cache.lock().unwrap().entry((spec.q(), d)).or_insert(list).clone()
}

pub fn factor(f: &Poly) -> Result<Factorization> {
    TrialDivision.factor(f)
}

/// mu(f) for monic nonzero f.
pub fn moebius(f: &Poly) -> Result<i8> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let fz = factor(f)?;
    if !fz.is_squarefree() {
        return Ok(0);
    }
    Ok(if fz.factors.len() % 2 == 0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::poly::parse_poly;

    fn f3() -> FieldSpec {
        FieldSpec::new(3).unwrap()
    }

    fn p(s: &str) -> Poly {
        parse_poly(s, f3()).unwrap()
    }

    #[test]
    fn factor_examples() {
        let fz = factor(&p("2*T^2+2*T")).unwrap();
        assert_eq!(fz.unit().value(), 2);
        assert_eq!(fz.factors(), &[(p("T"), 1), (p("T+1"), 1)]);

        let fz = factor(&p("T^2+1")).unwrap();
        assert_eq!(fz.unit().value(), 1);
        assert_eq!(fz.factors(), &[(p("T^2+1"), 1)]);

        let fz = factor(&p("T^3+1")).unwrap();
        assert_eq!(fz.factors(), &[(p("T+1"), 3)]);

        assert_eq!(factor(&Poly::zero(f3())), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn irreducibles_factor_as_themselves() {
        for d in 1..=4 {
            for irr in irreducibles_of_degree(f3(), d).iter() {
                assert_eq!(factor(irr).unwrap().factors(), &[(irr.clone(), 1)]);
            }
        }
    }

    #[test]
    fn factor_round_trip_exhaustive() {
        for d in 0..=5 {
            for f in enumerate_monic(f3(), d) {
                let fz = factor(&f).unwrap();
                assert_eq!(fz.expand(), f);
                for (q, _) in fz.factors() {
                    assert!(q.is_monic() && q.is_irreducible().unwrap());
                }
                let distinct: std::collections::HashSet<_> = fz.factors().iter().map(|x| &x.0).collect();
                assert_eq!(distinct.len(), fz.factors().len());
                assert_eq!(fz.is_squarefree(), f.is_squarefree().unwrap());
            }
        }
    }

    #[test]
    fn factor_non_monic() {
        let k = FieldSpec::new(5).unwrap();
        let f = parse_poly("3*T^4+2*T+1", k).unwrap();
        assert_eq!(factor(&f).unwrap().expand(), f);
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(&p("1")).unwrap(), 1);
        assert_eq!(moebius(&p("T^2+T")).unwrap(), 1);
        assert_eq!(moebius(&p("T^2")).unwrap(), 0);
        assert_eq!(moebius(&p("T")).unwrap(), -1);
        assert_eq!(moebius(&p("2*T")), Err(Error::NotMonic));
        assert_eq!(moebius(&Poly::zero(f3())), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn squarefree_sieve_identity() {
        // sum_{A monic, A^2 | D} mu(A) = [D squarefree]
        for q in [3, 5] {
            let k = FieldSpec::new(q).unwrap();
            for n in 0..=6 {
                for dd in enumerate_monic(k, n) {
                    let mut s = 0i32;
                    for a_deg in 0..=n / 2 {
                        for a in enumerate_monic(k, a_deg) {
                            if a.mul(&a).divides(&dd) {
                                s += moebius(&a).unwrap() as i32;
                            }
                        }
                    }
                    assert_eq!(s, dd.is_squarefree().unwrap() as i32, "{dd:?}");
                }
            }
        }
    }
}
