//! Critical energy levels `n_1 < n_2 < …` generated by the singular sources.
//!
//! Every level has the form `m + Σ_{l∈S} (1 + γ_l)` for an integer `m ≥ 0`
//! and a subset `S` of the sources; zero is excluded. All values are
//! normalized by `8π`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MERGE_TOL: f64 = 1e-9;
pub const DEFAULT_LEVEL_LIMIT: usize = 1_000_000;
/// Largest number of sources for which subsets are enumerated.
pub const MAX_SOURCES: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularitySet {
    gammas: Vec<f64>,
    positions: Option<Vec<[f64; 2]>>,
}

impl SingularitySet {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if gammas.len() > MAX_SOURCES {
            return Err(Error::InvalidInput(format!(
                "{} sources exceed the supported maximum {MAX_SOURCES}",
                gammas.len()
            )));
        }
        for (l, &g) in gammas.iter().enumerate() {
            if !g.is_finite() || g <= -1.0 {
                return Err(Error::InvalidInput(format!("gamma[{l}] = {g} must be > -1")));
            }
        }
        Ok(Self { gammas, positions: None })
    }

    pub fn empty() -> Self {
        Self { gammas: Vec::new(), positions: None }
    }

    /// Sources with positions on the unit torus `[0,1)²`.
    pub fn with_positions(gammas: Vec<f64>, positions: Vec<[f64; 2]>) -> Result<Self> {
        let mut s = Self::new(gammas)?;
        if positions.len() != s.gammas.len() {
            return Err(Error::InvalidInput(format!(
                "{} positions given for {} sources",
                positions.len(),
                s.gammas.len()
            )));
        }
        for (l, p) in positions.iter().enumerate() {
            if p.iter().any(|c| !(0.0..1.0).contains(c)) {
                return Err(Error::InvalidInput(format!("position[{l}] = {p:?} is not in [0,1)^2")));
            }
            if positions[..l].contains(p) {
                return Err(Error::InvalidInput(format!("position[{l}] = {p:?} repeats an earlier source")));
            }
        }
        s.positions = Some(positions);
        Ok(s)
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Weights `μ_l = 1 + γ_l`.
    pub fn mus(&self) -> Vec<f64> {
        self.gammas.iter().map(|g| 1.0 + g).collect()
    }

    pub fn gamma_sum(&self) -> f64 {
        self.gammas.iter().sum()
    }

    /// `Some(γ as integers)` when every strength is a positive integer.
    pub fn positive_integer_gammas(&self) -> Option<Vec<u64>> {
        self.gammas
            .iter()
            .map(|&g| (g >= 1.0 && g.fract() == 0.0 && g < 1e15).then_some(g as u64))
            .collect()
    }
}

/// Exact label `m + Σ_{l∈subset} μ_l` of an exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentKey {
    pub m: u32,
    pub subset: u64,
}

impl ExponentKey {
    pub const ZERO: ExponentKey = ExponentKey { m: 0, subset: 0 };

    /// Numeric value, summed in index order so equal keys always give
    /// bit-identical values.
    pub fn value(&self, mus: &[f64]) -> f64 {
        let mut v = self.m as f64;
        for (l, mu) in mus.iter().enumerate() {
            if self.subset & (1 << l) != 0 {
                v += mu;
            }
        }
        v
    }
}

/// Group values (sorted ascending) into clusters whose members lie within
/// `merge_tol` of the cluster minimum. Returns `(start, end)` index ranges.
pub(crate) fn cluster_sorted(values: &[f64], merge_tol: f64) -> Vec<(usize, usize)> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[start] > merge_tol {
            if start < values.len() {
                clusters.push((start, i));
            }
            start = i;
        }
    }
    clusters
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSpectrum {
    pub levels: Vec<f64>,
    pub cap: f64,
    pub merge_tol: f64,
}

impl CriticalSpectrum {
    /// Lower and upper level bracketing region `k`, with `n_0 = 0`. The upper
    /// level is `None` when it lies beyond the cap.
    pub fn bracket(&self, k: usize) -> (f64, Option<f64>) {
        let lower = if k == 0 { 0.0 } else { self.levels[k - 1] };
        (lower, self.levels.get(k).copied())
    }

    /// Index `j ≥ 1` of the level within `merge_tol` of `x`, if any.
    pub fn level_index(&self, x: f64) -> Option<usize> {
        let pos = self.levels.partition_point(|&v| v < x - self.merge_tol);
        (pos < self.levels.len() && (self.levels[pos] - x).abs() <= self.merge_tol).then_some(pos + 1)
    }
}

pub fn enumerate_spectrum(s: &SingularitySet, cap: f64, merge_tol: f64) -> Result<CriticalSpectrum> {
    enumerate_spectrum_limited(s, cap, merge_tol, DEFAULT_LEVEL_LIMIT)
}

pub fn enumerate_spectrum_limited(
    s: &SingularitySet,
    cap: f64,
    merge_tol: f64,
    limit: usize,
) -> Result<CriticalSpectrum> {
    if !(cap > 0.0) || !cap.is_finite() {
        return Err(Error::InvalidInput(format!("cap = {cap} must be positive and finite")));
    }
    if !(merge_tol >= 0.0) {
        return Err(Error::InvalidInput(format!("merge_tol = {merge_tol} must be non-negative")));
    }
    let mus = s.mus();
    let m_max = cap.ceil() as u32;
    let mut raw = Vec::new();
    for subset in 0u64..(1u64 << mus.len()) {
        let base = ExponentKey { m: 0, subset }.value(&mus);
        if base > cap {
            continue;
        }
        for m in 0..=m_max {
            let v = ExponentKey { m, subset }.value(&mus);
            if v > cap {
                break;
            }
            if v > 0.0 {
                raw.push(v);
            }
        }
        if raw.len() > limit.saturating_mul(16) {
            return Err(Error::TooManyLevels { limit });
        }
    }
    raw.sort_by(f64::total_cmp);
    let levels: Vec<f64> = cluster_sorted(&raw, merge_tol).into_iter().map(|(a, _)| raw[a]).collect();
    if levels.len() > limit {
        return Err(Error::TooManyLevels { limit });
    }
    Ok(CriticalSpectrum { levels, cap, merge_tol })
}

/// Region index `k` with `n_k < q < n_{k+1}` (`n_0 = 0`).
pub fn locate_region(q: f64, spec: &CriticalSpectrum, tol: f64) -> Result<usize> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidInput(format!("q = {q} must be positive")));
    }
    let largest = spec.levels.last().copied().unwrap_or(0.0);
    if q > largest + tol {
        return Err(Error::OutOfRange { q, largest });
    }
    for (idx, &level) in spec.levels.iter().enumerate() {
        if (q - level).abs() <= tol {
            return Err(Error::OnCriticalSurface { k: idx + 1, level, q });
        }
    }
    Ok(spec.levels.partition_point(|&v| v < q))
}
