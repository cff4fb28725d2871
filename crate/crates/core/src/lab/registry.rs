use std::fmt;
use std::str::FromStr;

use super::experiments::*;
use super::report::ExperimentReport;
use super::LabConfig;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::{irreducibles_of_degree, Poly};

/// One registered experiment.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub params: &'static str,
    pub pass_rule: &'static str,
    /// Selected by `verify all`.
    pub in_verify_all: bool,
}

pub const REGISTRY: &[ExperimentInfo] = &[
    ExperimentInfo {
        id: "lemma1",
        summary: "count of D in H coprime to f against q^(2g+1)(1-1/q) prod |P|/(|P|+1)",
        params: "q, g, f",
        pass_rule: "difference recorded at scale q^(g+1/2); exactly 0 for f = 1, g >= 1",
        in_verify_all: true,
    },
    ExperimentInfo {
        id: "lemma2",
        summary: "sum over deg f = n of prod (1+|P|^-1)^-1 against its Moebius expansion",
        params: "q, n",
        pass_rule: "exact rational equality",
        in_verify_all: true,
    },
    ExperimentInfo {
        id: "lemma3",
        summary: "S(f) = sum_D (D/f) over non-square f, scaled by q^((2g+1)/2) |f|^(1/4)",
        params: "q, g, max_deg_f",
        pass_rule: "maximum recorded; S(f) equals its squarefree-sieve decomposition",
        in_verify_all: true,
    },
    ExperimentInfo {
        id: "pv",
        summary: "character sums over monic B of degree n modulo non-square f",
        params: "q, f, n | q, max_deg_f, extra",
        pass_rule: "exact vanishing for n >= deg f",
        in_verify_all: true,
    },
    ExperimentInfo {
        id: "fe",
        summary: "functional equation and truncation of every L-polynomial in H(q, g)",
        params: "q, g",
        pass_rule: "zero violations",
        in_verify_all: true,
    },
    ExperimentInfo {
        id: "rh",
        summary: "inverse roots of every L-polynomial in H(q, g) have modulus sqrt(q)",
        params: "q, g",
        pass_rule: "every deviation within the root tolerance",
        in_verify_all: true,
    },
    ExperimentInfo {
        id: "square-term",
        summary: "square part of sum_D sum_f chi_D(f)|f|^-2 against its main term",
        params: "q, g",
        pass_rule: "square + nonsquare equals the total exactly",
        in_verify_all: true,
    },
    ExperimentInfo {
        id: "nonsquare-term",
        summary: "non-square part of the same double sum, scaled by q^g",
        params: "q, g",
        pass_rule: "square + nonsquare equals the total exactly",
        in_verify_all: true,
    },
    ExperimentInfo {
        id: "symbol",
        summary: "Euclidean symbol against the factorization oracle",
        params: "q, max_deg",
        pass_rule: "zero mismatches",
        in_verify_all: false,
    },
    ExperimentInfo {
        id: "mean-k2",
        summary: "average K2 order over H(q, g) against q^(3g) zeta_A(4) P(4)",
        params: "q, g",
        pass_rule: "integrality; mean exactly 1 at g = 0",
        in_verify_all: false,
    },
    ExperimentInfo {
        id: "mean-k2-trend",
        summary: "relative error of the K2 average across g",
        params: "q, g list, C",
        pass_rule: "strict decay and below C q^(1-g)",
        in_verify_all: false,
    },
    ExperimentInfo {
        id: "mean-l",
        summary: "sum of L(2, chi_D) over H(q, g)",
        params: "q, g",
        pass_rule: "recorded; sum is q at g = 0",
        in_verify_all: false,
    },
    ExperimentInfo {
        id: "rosen",
        summary: "average K2 order over all squarefree m of degree M",
        params: "q, M",
        pass_rule: "integrality over every leading coefficient",
        in_verify_all: false,
    },
    ExperimentInfo {
        id: "rosen-trend",
        summary: "relative error of the all-squarefree average across M",
        params: "q, M list",
        pass_rule: "strict decay",
        in_verify_all: false,
    },
    ExperimentInfo {
        id: "constants-table",
        summary: "zeta_A(4) P(4) against zeta_A(2) zeta_A(4) c(2) with empirical means",
        params: "q, g_max",
        pass_rule: "disjoint enclosures",
        in_verify_all: false,
    },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyKind {
    Lemma1,
    Lemma2,
    Lemma3,
    Pv,
    Fe,
    Rh,
    SquareTerm,
    NonsquareTerm,
    Symbol,
    All,
}

impl VerifyKind {
    pub const ALL: [VerifyKind; 8] = [
        VerifyKind::Lemma1,
        VerifyKind::Lemma2,
        VerifyKind::Lemma3,
        VerifyKind::Pv,
        VerifyKind::Fe,
        VerifyKind::Rh,
        VerifyKind::SquareTerm,
        VerifyKind::NonsquareTerm,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            VerifyKind::Lemma1 => "lemma1",
            VerifyKind::Lemma2 => "lemma2",
            VerifyKind::Lemma3 => "lemma3",
            VerifyKind::Pv => "pv",
            VerifyKind::Fe => "fe",
            VerifyKind::Rh => "rh",
            VerifyKind::SquareTerm => "square-term",
            VerifyKind::NonsquareTerm => "nonsquare-term",
            VerifyKind::Symbol => "symbol",
            VerifyKind::All => "all",
        }
    }
}

impl fmt::Display for VerifyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for VerifyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VerifyKind::ALL
            .iter()
            .chain(&[VerifyKind::Symbol, VerifyKind::All])
            .find(|k| k.id() == s)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment kind {s:?}")))
    }
}

/// Parameters of a `verify` run. Unset fields fall back to sweeps.
#[derive(Debug, Clone)]
pub struct VerifyParams {
    pub g: Option<usize>,
    pub g_max: usize,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub f: Option<Poly>,
    pub max_deg_f: usize,
    pub extra: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { g: None, g_max: 2, n: None, n_max: None, f: None, max_deg_f: 4, extra: 3 }
    }
}

impl VerifyParams {
    fn genera(&self, from: usize) -> Vec<usize> {
        match self.g {
            Some(g) => vec![g],
            None => (from..=self.g_max).collect(),
        }
    }
}

/// Moduli used by the coprimality count when none is given.
fn default_moduli(spec: FieldSpec) -> Vec<Poly> {
    let t = Poly::t(spec);
    let t1 = t.add(&Poly::one(spec));
    vec![Poly::one(spec), t.clone(), t.mul(&t1), t.mul(&t), irreducibles_of_degree(spec, 2)[0].clone()]
}

pub fn verify_kind(
    kind: VerifyKind,
    spec: FieldSpec,
    params: &VerifyParams,
    cfg: &LabConfig,
) -> Result<Vec<ExperimentReport>> {
    let mut out = Vec::new();
    match kind {
        VerifyKind::All => return verify_suite(spec, params, cfg),
        VerifyKind::Lemma1 => {
            let moduli = params.f.clone().map(|f| vec![f]).unwrap_or_else(|| default_moduli(spec));
            for g in params.genera(1) {
                for f in &moduli {
                    out.push(lemma1_check(spec, g, f, cfg)?);
                }
            }
        }
        VerifyKind::Lemma2 => {
            let ns: Vec<usize> = match params.n {
                Some(n) => vec![n],
                None => (0..=params.n_max.unwrap_or(2 * params.g_max + 4)).collect(),
            };
            for n in ns {
                out.push(lemma2_check(spec, n, cfg)?);
            }
        }
        VerifyKind::Lemma3 => {
            for g in params.genera(1) {
                out.push(lemma3_check(spec, g, params.max_deg_f, cfg)?);
            }
        }
        VerifyKind::Pv => match (&params.f, params.n) {
            (Some(f), Some(n)) => out.push(pv_check(spec, f, n, cfg)?),
            _ => out.push(pv_sweep(spec, params.max_deg_f, params.extra, cfg)?),
        },
        VerifyKind::Fe => {
            for g in params.genera(0) {
                out.push(fe_sweep(spec, g, cfg)?);
            }
        }
        VerifyKind::Rh => {
            for g in params.genera(0) {
                out.push(rh_sweep(spec, g, cfg)?);
            }
        }
        VerifyKind::SquareTerm => {
            for g in params.genera(0) {
                out.push(square_term_check(spec, g, cfg)?);
            }
        }
        VerifyKind::NonsquareTerm => {
            for g in params.genera(0) {
                out.push(nonsquare_term_check(spec, g, cfg)?);
            }
        }
        VerifyKind::Symbol => out.push(symbol_equivalence(spec, params.max_deg_f, cfg)?),
    }
    Ok(out)
}

/// Every kind marked for `verify all`, in registry order.
pub fn verify_suite(
    spec: FieldSpec,
    params: &VerifyParams,
    cfg: &LabConfig,
) -> Result<Vec<ExperimentReport>> {
    let mut out = Vec::new();
    for info in REGISTRY.iter().filter(|i| i.in_verify_all) {
        let kind: VerifyKind = info.id.parse()?;
        out.extend(verify_kind(kind, spec, params, cfg)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique_and_parse() {
        let mut ids: Vec<_> = REGISTRY.iter().map(|i| i.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), REGISTRY.len());
        for k in VerifyKind::ALL {
            assert_eq!(k.id().parse::<VerifyKind>().unwrap(), k);
            assert!(REGISTRY.iter().any(|i| i.id == k.id() && i.in_verify_all));
        }
        assert!("bogus".parse::<VerifyKind>().is_err());
    }
}
