use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{monic_offset, mul_raw, Poly};
use crate::field::FieldSpec;

const UNSET: u32 = u32::MAX;

/// Smallest-irreducible-factor table over all monic polynomials of degree
/// at most `max_degree`, addressed by [`Poly::monic_index`].
///
/// Entry `i` holds `(p, c)` with `p` the index of the smallest irreducible
/// factor (by index order) and `c` the index of the cofactor. Irreducibles
/// have `p == i`; the polynomial 1 sits at index 0.
#[derive(Debug)]
pub struct MonicSieve {
    spec: FieldSpec,
    max_degree: usize,
    spf: Vec<u32>,
    cof: Vec<u32>,
}

type SieveCache = Mutex<HashMap<(u32, usize), Arc<MonicSieve>>>;

impl MonicSieve {
    pub fn build(spec: FieldSpec, max_degree: usize) -> MonicSieve {
        let q = spec.q() as usize;
        let len = monic_offset(q, max_degree + 1);
        assert!(len < UNSET as usize, "sieve too large");
        let mut spf = vec![UNSET; len];
        let mut cof = vec![0u32; len];
        if len > 0 {
            spf[0] = 0;
        }
        for i in 1..len {
            if spf[i] != UNSET {
                continue;
            }
            spf[i] = i as u32;
            let p = Poly::from_monic_index(spec, i);
            let dp = p.deg() as usize;
            // first visit of each composite comes from its smallest irreducible factor
            for j in 1..monic_offset(q, max_degree - dp + 1) {
                let m = Poly::from_monic_index(spec, j);
                let prod = Poly::from_raw(spec, mul_raw(spec, p.coeffs(), m.coeffs()));
                let k = prod.monic_index().unwrap();
                if spf[k] == UNSET {
                    spf[k] = i as u32;
                    cof[k] = j as u32;
                }
            }
        }
        MonicSieve { spec, max_degree, spf, cof }
    }

    /// Memoized per (q, max_degree); built once and then shared read-only.
    pub fn shared(spec: FieldSpec, max_degree: usize) -> Arc<MonicSieve> {
        static CACHE: OnceLock<SieveCache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (spec.q(), max_degree);
        if let Some(s) = cache.lock().unwrap().get(&key) {
            return s.clone();
        }
        let built = Arc::new(MonicSieve::build(spec, max_degree));
        cache.lock().unwrap().entry(key).or_insert(built).clone()
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.spf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spf.is_empty()
    }

    /// Index range of the monic polynomials of degree exactly `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        let q = self.spec.q() as usize;
        monic_offset(q, d)..monic_offset(q, d + 1)
    }

    pub fn poly(&self, index: usize) -> Poly {
        Poly::from_monic_index(self.spec, index)
    }

    pub fn index_of(&self, f: &Poly) -> Option<usize> {
        f.monic_index().filter(|&i| i < self.len())
    }

    #[inline]
    pub fn is_irreducible(&self, index: usize) -> bool {
        index != 0 && self.spf[index] as usize == index
    }

    /// `(smallest irreducible factor, cofactor)` as indices; `None` for 1.
    #[inline]
    pub fn split(&self, index: usize) -> Option<(usize, usize)> {
        if index == 0 {
            None
        } else if self.spf[index] as usize == index {
            Some((index, 0))
        } else {
            Some((self.spf[index] as usize, self.cof[index] as usize))
        }
    }

    /// Distinct irreducible factors with multiplicities, as indices.
    pub fn factor(&self, mut index: usize) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = Vec::new();
        while let Some((p, c)) = self.split(index) {
            match out.last_mut() {
                Some((last, e)) if *last == p => *e += 1,
                _ => out.push((p, 1)),
            }
            index = c;
        }
        out
    }

    pub fn moebius(&self, index: usize) -> i8 {
        let fz = self.factor(index);
        if fz.iter().any(|&(_, e)| e > 1) {
            0
        } else if fz.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self, index: usize) -> bool {
        self.factor(index).iter().all(|&(_, e)| e % 2 == 0)
    }

    /// Degree of the monic polynomial at `index`.
    pub fn degree_of(&self, index: usize) -> usize {
        let q = self.spec.q() as usize;
        let mut d = 0;
        while monic_offset(q, d + 1) <= index {
            d += 1;
        }
        d
    }
}
