//! Truncated generating function
//! `g(x) = (1 + x + x² + …)^{N−χ} Π_l (1 − x^{1+γ_l})`
//! with integer coefficients on real exponents.
//!
//! Exponents are carried as exact [`ExponentKey`]s (an integer part plus a
//! subset of the source weights) so repeated products never accumulate
//! rounding; numeric values are only formed for ordering and merging.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{cluster_sorted, CriticalSpectrum, ExponentKey, SingularitySet, MAX_SOURCES};

pub const DEFAULT_CAP: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub key: ExponentKey,
    pub coefficient: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub exponent: f64,
    pub coefficient: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSeries {
    mus: Vec<f64>,
    terms: Vec<Term>,
    cap: f64,
    merge_tol: f64,
}

impl GeneralizedSeries {
    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Nonzero `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn entries(&self) -> Vec<SeriesEntry> {
        self.terms
            .iter()
            .map(|t| SeriesEntry { exponent: t.key.value(&self.mus), coefficient: t.coefficient })
            .collect()
    }

    /// Coefficient at the exponent within `merge_tol` of `x` (zero if absent).
    pub fn coefficient_at(&self, x: f64) -> i64 {
        self.terms
            .iter()
            .find(|t| (t.key.value(&self.mus) - x).abs() <= self.merge_tol)
            .map_or(0, |t| t.coefficient)
    }

    /// Sum of all stored coefficients, i.e. the truncated polynomial at `x = 1`.
    pub fn coefficient_sum(&self) -> Result<i64> {
        self.terms
            .iter()
            .try_fold(0i64, |acc, t| acc.checked_add(t.coefficient))
            .ok_or(Error::CoefficientOverflow)
    }

    fn from_candidates(mus: Vec<f64>, mut terms: Vec<Term>, cap: f64, merge_tol: f64) -> Result<Self> {
        terms.retain(|t| t.key.value(&mus) <= cap);
        terms.sort_by(|a, b| a.key.value(&mus).total_cmp(&b.key.value(&mus)).then(a.key.cmp(&b.key)));
        let values: Vec<f64> = terms.iter().map(|t| t.key.value(&mus)).collect();
        let mut merged = Vec::with_capacity(terms.len());
        for (start, end) in cluster_sorted(&values, merge_tol) {
            let coefficient = terms[start..end]
                .iter()
                .try_fold(0i64, |acc, t| acc.checked_add(t.coefficient))
                .ok_or(Error::CoefficientOverflow)?;
            if coefficient != 0 {
                merged.push(Term { key: terms[start].key, coefficient });
            }
        }
        Ok(Self { mus, terms: merged, cap, merge_tol })
    }
}

fn binomial(n: u64, k: u64) -> Result<i64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c
            .checked_mul((n - i) as u128)
            .ok_or(Error::CoefficientOverflow)?
            / (i as u128 + 1);
    }
    i64::try_from(c).map_err(|_| Error::CoefficientOverflow)
}

/// Expansion of `(1 − x)^{χ−N}` at integer exponents up to `⌊cap⌋`.
pub fn expand_base(chi: i64, n_sources: usize, cap: f64, merge_tol: f64) -> Result<GeneralizedSeries> {
    if !(cap > 0.0) || !cap.is_finite() {
        return Err(Error::InvalidInput(format!("cap = {cap} must be positive and finite")));
    }
    let power = chi - n_sources as i64;
    let top = cap.floor() as u64;
    let mut terms = Vec::new();
    for m in 0..=top {
        let coefficient = if power >= 0 {
            let c = binomial(power as u64, m)?;
            if m % 2 == 1 { -c } else { c }
        } else {
            let k = power.unsigned_abs();
            binomial(m + k - 1, k - 1)?
        };
        if coefficient != 0 {
            let m = u32::try_from(m).map_err(|_| Error::InvalidInput("cap too large".into()))?;
            terms.push(Term { key: ExponentKey { m, subset: 0 }, coefficient });
        }
    }
    GeneralizedSeries::from_candidates(Vec::new(), terms, cap, merge_tol)
}

/// `s · (1 − x^{1+γ})`, truncated at the cap of `s`.
pub fn multiply_singular_factor(s: &GeneralizedSeries, gamma: f64) -> Result<GeneralizedSeries> {
    if !(gamma > -1.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!("gamma = {gamma} must be > -1")));
    }
    if s.mus.len() >= MAX_SOURCES {
        return Err(Error::InvalidInput(format!("at most {MAX_SOURCES} singular factors")));
    }
    let bit = 1u64 << s.mus.len();
    let mut mus = s.mus.clone();
    mus.push(1.0 + gamma);
    let mut terms = s.terms.clone();
    for t in &s.terms {
        let coefficient = t.coefficient.checked_neg().ok_or(Error::CoefficientOverflow)?;
        terms.push(Term { key: ExponentKey { m: t.key.m, subset: t.key.subset | bit }, coefficient });
    }
    GeneralizedSeries::from_candidates(mus, terms, s.cap, s.merge_tol)
}

pub fn build_generating_function(
    chi: i64,
    s: &SingularitySet,
    cap: f64,
    merge_tol: f64,
) -> Result<GeneralizedSeries> {
    s.gammas()
        .iter()
        .try_fold(expand_base(chi, s.len(), cap, merge_tol)?, |acc, &g| multiply_singular_factor(&acc, g))
}

/// `[(0, b_0), (n_1, b_1), (n_2, b_2), …]` with one entry per spectrum level.
pub fn coefficients_aligned(g: &GeneralizedSeries, spec: &CriticalSpectrum) -> Result<Vec<(f64, i64)>> {
    let mut out = Vec::with_capacity(spec.levels.len() + 1);
    out.push((0.0, 0));
    out.extend(spec.levels.iter().map(|&v| (v, 0)));
    for entry in g.entries() {
        let slot = if entry.exponent.abs() <= g.merge_tol {
            Some(0)
        } else {
            spec.level_index(entry.exponent)
        };
        match slot {
            Some(j) => out[j].1 += entry.coefficient,
            None => {
                return Err(Error::UnalignedExponent {
                    exponent: entry.exponent,
                    coefficient: entry.coefficient,
                })
            }
        }
    }
    Ok(out)
}
