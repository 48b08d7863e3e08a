//! Leray–Schauder degree of the system from topology and singularity data.
//!
//! For `ρ` strictly between the critical levels `n_k` and `n_{k+1}`, the degree
//! is the partial sum `b_0 + b_1 + … + b_k` of the generating-function
//! coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_hypotheses, InteractionMatrix, DEFAULT_TOL};
use crate::series::{build_generating_function, coefficients_aligned};
use crate::spectrum::{enumerate_spectrum, locate_region, SingularitySet, DEFAULT_MERGE_TOL};

/// Default tolerance (normalized units) for landing on a critical level.
pub const DEFAULT_CRITICAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SurfaceKind {
    ClosedSurface { genus: u32 },
    PlanarDomain { holes: u32 },
    /// Raw Euler characteristic, treated as a closed surface.
    Chi { chi: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
}

impl SurfaceSpec {
    pub fn closed(genus: u32) -> Self {
        Self { kind: SurfaceKind::ClosedSurface { genus } }
    }

    pub fn sphere() -> Self {
        Self::closed(0)
    }

    pub fn torus() -> Self {
        Self::closed(1)
    }

    pub fn domain(holes: u32) -> Self {
        Self { kind: SurfaceKind::PlanarDomain { holes } }
    }

    pub fn with_chi(chi: i64) -> Self {
        Self { kind: SurfaceKind::Chi { chi } }
    }

    pub fn chi(&self) -> i64 {
        match self.kind {
            SurfaceKind::ClosedSurface { genus } => 2 - 2 * genus as i64,
            SurfaceKind::PlanarDomain { holes } => 1 - holes as i64,
            SurfaceKind::Chi { chi } => chi,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub surface: SurfaceSpec,
    pub singularities: SingularitySet,
    pub matrix: InteractionMatrix,
    pub rho: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(
        surface: SurfaceSpec,
        singularities: SingularitySet,
        matrix: InteractionMatrix,
        rho: Vec<f64>,
    ) -> Result<Self> {
        if rho.len() != matrix.n() {
            return Err(Error::InvalidInput(format!(
                "rho has {} components but the matrix is {}x{}",
                rho.len(),
                matrix.n(),
                matrix.n()
            )));
        }
        check_rho(&rho)?;
        Ok(Self { surface, singularities, matrix, rho })
    }

    pub fn normalized_energy(&self) -> Result<f64> {
        normalized_energy(&self.rho, &self.matrix)
    }
}

fn check_rho(rho: &[f64]) -> Result<()> {
    for (index, &value) in rho.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::InvalidInput(format!("rho[{index}] is not finite")));
        }
        if value < 0.0 {
            return Err(Error::NegativeRho { index, value });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeResult {
    pub degree: i64,
    pub region_k: usize,
    pub q_normalized: f64,
    /// `(n_k, n_{k+1})` with `n_0 = 0`.
    pub nearest_levels: (f64, f64),
    /// `b_0, …, b_k`.
    pub partial_coefficients: Vec<i64>,
}

/// `q = Σ a_ij ρ_i ρ_j / (8π Σ ρ_i)`.
pub fn normalized_energy(rho: &[f64], a: &InteractionMatrix) -> Result<f64> {
    if rho.len() != a.n() {
        return Err(Error::InvalidInput(format!("rho has {} components, expected {}", rho.len(), a.n())));
    }
    check_rho(rho)?;
    let total: f64 = rho.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMass(total));
    }
    Ok(a.quadratic_form(rho) / (8.0 * PI * total))
}

pub fn leray_schauder_degree(p: &ProblemInstance, cap: f64, tol: f64) -> Result<DegreeResult> {
    leray_schauder_degree_with(p, cap, tol, DEFAULT_MERGE_TOL)
}

pub fn leray_schauder_degree_with(p: &ProblemInstance, cap: f64, tol: f64, merge_tol: f64) -> Result<DegreeResult> {
    let report = check_hypotheses(&p.matrix, DEFAULT_TOL);
    if !report.holds {
        return Err(Error::HypothesisViolation(report.to_string()));
    }
    let q = p.normalized_energy()?;
    if q > cap {
        return Err(Error::OutOfRange { q, largest: cap });
    }
    let work_cap = cap + 1.0;
    let spectrum = enumerate_spectrum(&p.singularities, work_cap, merge_tol)?;
    let k = locate_region(q, &spectrum, tol)?;
    let g = build_generating_function(p.surface.chi(), &p.singularities, work_cap, merge_tol)?;
    let aligned = coefficients_aligned(&g, &spectrum)?;
    let partial: Vec<i64> = aligned[..=k].iter().map(|&(_, b)| b).collect();
    let degree = partial
        .iter()
        .try_fold(0i64, |acc, &b| acc.checked_add(b))
        .ok_or(Error::CoefficientOverflow)?;
    let (lower, upper) = spectrum.bracket(k);
    Ok(DegreeResult {
        degree,
        region_k: k,
        q_normalized: q,
        nearest_levels: (lower, upper.expect("work cap exceeds q by one unit")),
        partial_coefficients: partial,
    })
}

/// Forced masses `ρ_i = 4π (Σ_j a^{ij}) Σ_l γ_l` of the unnormalized system
/// `Δu_i + Σ_j a_ij h_j e^{u_j} = 4π Σ_l γ_l δ_{p_l}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassNormalization {
    pub rho: Vec<f64>,
    /// Components with `ρ_i ≤ 0`, for which that formulation is inconsistent.
    pub nonpositive: Vec<usize>,
}

pub fn mass_normalization(s: &SingularitySet, a: &InteractionMatrix) -> Result<MassNormalization> {
    let total = 4.0 * PI * s.gamma_sum();
    let rho: Vec<f64> = a.inverse_row_sums()?.into_iter().map(|r| r * total).collect();
    let nonpositive = rho.iter().enumerate().filter(|(_, &r)| r <= 0.0).map(|(i, _)| i).collect();
    Ok(MassNormalization { rho, nonpositive })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusDegree {
    pub degree: i64,
    pub rho: Vec<f64>,
    pub q: f64,
}

/// Closed-form degree `½ Π (1 + γ_l)` on the torus for positive integer
/// strengths with odd sum, cross-checked against the generating-function
/// route on the induced instance.
pub fn torus_special_degree(s: &SingularitySet, a: &InteractionMatrix) -> Result<TorusDegree> {
    let gammas = s.positive_integer_gammas().ok_or_else(|| {
        Error::PreconditionFailed("every gamma must be a positive integer".into())
    })?;
    let m: u64 = gammas.iter().sum();
    if m.is_multiple_of(2) {
        return Err(Error::PreconditionFailed(format!("sum of gammas {m} is even")));
    }
    let report = check_hypotheses(a, DEFAULT_TOL);
    if !report.holds {
        return Err(Error::HypothesisViolation(report.to_string()));
    }
    let masses = mass_normalization(s, a)?;
    let q = normalized_energy(&masses.rho, a)?;
    let expected_q = m as f64 / 2.0;
    if (q - expected_q).abs() > 1e-9 * expected_q.max(1.0) {
        return Err(Error::PreconditionFailed(format!("induced q = {q} differs from {expected_q}")));
    }
    let product = gammas
        .iter()
        .try_fold(1i64, |acc, &g| acc.checked_mul(g as i64 + 1))
        .ok_or(Error::CoefficientOverflow)?;
    let degree = product / 2;

    let instance = ProblemInstance::new(SurfaceSpec::torus(), s.clone(), a.clone(), masses.rho.clone())?;
    let cap = (m as f64 + 1.0) / 2.0;
    let route = leray_schauder_degree(&instance, cap, DEFAULT_CRITICAL_TOL)?;
    if route.degree != degree {
        return Err(Error::PreconditionFailed(format!(
            "closed form {degree} disagrees with generating-function degree {}",
            route.degree
        )));
    }
    Ok(TorusDegree { degree, rho: masses.rho, q })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceCertificate {
    pub exists: bool,
    pub degree: i64,
    /// Positive-integer strengths on a surface with `χ ≤ 0` (or a planar
    /// domain with holes), where the degree is forced to be positive.
    pub structural_condition: bool,
    pub explanation: String,
}

pub fn existence_certificate(p: &ProblemInstance, cap: f64, tol: f64) -> Result<ExistenceCertificate> {
    let result = leray_schauder_degree(p, cap, tol)?;
    let integer_gammas = p.singularities.positive_integer_gammas().is_some();
    let structural = integer_gammas
        && match p.surface.kind {
            SurfaceKind::PlanarDomain { holes } => holes >= 1,
            _ => p.surface.chi() <= 0,
        };
    if structural && result.degree <= 0 {
        return Err(Error::PreconditionFailed(format!(
            "structural condition holds but the computed degree is {}",
            result.degree
        )));
    }
    let exists = result.degree != 0;
    let explanation = match (exists, structural) {
        (true, true) => format!(
            "degree {} > 0, as forced by integer strengths and chi = {} <= 0; a solution exists",
            result.degree,
            p.surface.chi()
        ),
        (true, false) => format!("degree {} is nonzero; a solution exists", result.degree),
        (false, _) => "degree is zero; no existence conclusion".to_string(),
    };
    Ok(ExistenceCertificate { exists, degree: result.degree, structural_condition: structural, explanation })
}
