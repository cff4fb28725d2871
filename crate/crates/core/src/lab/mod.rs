//! Brute-force experiments over the discriminant family H(q, g).
//!
//! Work is partitioned across a rayon pool of `workers` threads. Per-item
//! results are collected in enumeration order and reduced with exact integer
//! or rational sums, so every exact output is identical for any worker count.

mod experiments;
mod registry;
pub mod report;

use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::lfunc::{l_polynomial_with, LPolynomial, SymbolPath};
use crate::poly::{enumerate_h, h_count, monic_count_upto, Poly};

pub use experiments::*;
pub use registry::{verify_kind, verify_suite, ExperimentInfo, VerifyKind, VerifyParams, REGISTRY};
pub use report::{Comparison, ExperimentReport, Quantity};

#[derive(Debug, Clone)]
pub struct LabConfig {
    pub workers: usize,
    /// Ceiling on the estimated number of symbol evaluations.
    pub budget: u128,
    pub rel_err: f64,
    pub rh_tol: f64,
    pub path: SymbolPath,
    /// C in the envelope |ratio - 1| <= C q^(1-g).
    pub trend_constant: u32,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            budget: 1_000_000_000,
            rel_err: 1e-12,
            rh_tol: 1e-6,
            path: SymbolPath::Sieve,
            trend_constant: 5,
        }
    }
}

impl LabConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidArgument("worker count must be at least 1".into()));
        }
        if [self.rel_err, self.rh_tol].iter().any(|x| x.is_nan() || *x <= 0.0) {
            return Err(Error::InvalidArgument("rel_err and tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Map `f` over `items` on the configured pool, preserving order.
    pub(crate) fn par_map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(pool.install(|| items.par_iter().map(&f).collect()))
    }

    pub(crate) fn check_budget(&self, required: u128) -> Result<()> {
        if required > self.budget {
            return Err(Error::WorkBudget { required, ceiling: self.budget });
        }
        Ok(())
    }
}

/// All of H(q, g) with their L-polynomials.
pub struct Family {
    pub spec: FieldSpec,
    pub g: usize,
    pub members: Vec<Poly>,
    pub lpolys: Vec<LPolynomial>,
}

/// Estimated symbol evaluations for L-polynomials over H(q, g).
pub fn family_cost(spec: FieldSpec, g: usize) -> u128 {
    let h: BigInt = h_count(spec, g);
    let per = monic_count_upto(spec, 2 * g + 2) as u128;
    u128::try_from(h).unwrap_or(u128::MAX).saturating_mul(per)
}

pub fn family(spec: FieldSpec, g: usize, cfg: &LabConfig) -> Result<Family> {
    cfg.check_budget(family_cost(spec, g))?;
    let members: Vec<Poly> = enumerate_h(spec, g).collect();
    let lpolys =
        cfg.par_map(&members, |d| l_polynomial_with(d, cfg.path))?.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Family { spec, g, members, lpolys })
}

pub(crate) fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, u64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_millis() as u64))
}
