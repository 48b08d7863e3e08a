//! Mass identities satisfied by concentrating solutions.
//!
//! At a blowup point of weight `μ = 1 + γ`, the local masses `σ_i` lie on the
//! quadric `Σ a_ij σ_i σ_j = 4 μ Σ σ_i`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ConditionReport, InteractionMatrix, Violation};

pub const DEFAULT_INTEGER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassVector {
    pub sigma: Vec<f64>,
    pub mu: f64,
}

impl MassVector {
    pub fn new(sigma: Vec<f64>, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidInput(format!("mu = {mu} must be positive")));
        }
        if let Some(i) = sigma.iter().position(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma[{i}] = {} must be non-negative", sigma[i])));
        }
        Ok(Self { sigma, mu })
    }

    pub fn total(&self) -> f64 {
        self.sigma.iter().sum()
    }
}

fn check_len(a: &InteractionMatrix, v: &[f64], what: &str) -> Result<()> {
    if v.len() != a.n() {
        return Err(Error::InvalidInput(format!("{what} has {} components, expected {}", v.len(), a.n())));
    }
    Ok(())
}

/// `Σ a_ij σ_i σ_j − 4 μ Σ σ_i`.
pub fn pohozaev_residual(a: &InteractionMatrix, m: &MassVector) -> Result<f64> {
    check_len(a, &m.sigma, "sigma")?;
    Ok(a.quadratic_form(&m.sigma) - 4.0 * m.mu * m.total())
}

/// The point `t·d` (`t > 0`) where the ray along `d` meets the quadric.
pub fn solve_mass_on_hypersurface(a: &InteractionMatrix, mu: f64, direction: &[f64]) -> Result<MassVector> {
    check_len(a, direction, "direction")?;
    if let Some(i) = direction.iter().position(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidInput(format!("direction[{i}] = {} must be positive", direction[i])));
    }
    let form = a.quadratic_form(direction);
    if !(form > 0.0) {
        return Err(Error::DegenerateDirection(form));
    }
    let t = 4.0 * mu * direction.iter().sum::<f64>() / form;
    MassVector::new(direction.iter().map(|d| t * d).collect(), mu)
}

/// `m_i = Σ_j a_ij σ_j > 2μ` for every component.
pub fn minimal_mass_check(a: &InteractionMatrix, m: &MassVector) -> Result<ConditionReport> {
    check_len(a, &m.sigma, "sigma")?;
    let violations = a
        .apply(&m.sigma)
        .into_iter()
        .enumerate()
        .filter(|&(_, mi)| !(mi > 2.0 * m.mu))
        .map(|(i, mi)| Violation { condition: "minimal_mass".into(), indices: vec![i], value: mi })
        .collect();
    Ok(ConditionReport::from_violations(violations))
}

/// Masses at a second blowup point of weight `μ_q`: `σ̄ = (μ_q/μ_p) σ`.
pub fn energy_scaling_between_points(sigma_p: &MassVector, mu_q: f64) -> Result<MassVector> {
    let ratio = mu_q / sigma_p.mu;
    MassVector::new(sigma_p.sigma.iter().map(|s| ratio * s).collect(), mu_q)
}

/// Non-simple blowup at a source is only possible when `1 + γ` is a positive
/// integer.
pub fn nonsimple_blowup_admissible(gamma: f64, tol: f64) -> bool {
    let mu = 1.0 + gamma;
    let nearest = mu.round();
    nearest >= 1.0 && (mu - nearest).abs() <= tol
}

/// Split of `ρ_i` over blowup points in proportion to their weights:
/// `σ_{i,l} = ρ_i μ_l / (2π Σ_s μ_s)`. Row `i` holds component `i`.
pub fn local_mass_split(rho: &[f64], mus: &[f64]) -> Result<Vec<Vec<f64>>> {
    if mus.is_empty() || mus.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::InvalidInput("weights must be non-empty and positive".into()));
    }
    let total: f64 = mus.iter().sum();
    Ok(rho
        .iter()
        .map(|&r| mus.iter().map(|&mu| r * mu / (2.0 * PI * total)).collect())
        .collect())
}

/// `Σ a_ij ρ_i ρ_j − 8π (Σ_l μ_l)(Σ_i ρ_i)`; zero on the critical surface
/// produced by blowup at points with weights `μ_l`.
pub fn critical_surface_from_blowup(a: &InteractionMatrix, rho: &[f64], mus: &[f64]) -> Result<f64> {
    check_len(a, rho, "rho")?;
    let total: f64 = rho.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMass(total));
    }
    Ok(a.quadratic_form(rho) - 8.0 * PI * mus.iter().sum::<f64>() * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar() -> InteractionMatrix {
        InteractionMatrix::new(&[vec![1.0]]).unwrap()
    }

    fn swap() -> InteractionMatrix {
        InteractionMatrix::new(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn residual_examples() {
        assert_eq!(pohozaev_residual(&scalar(), &MassVector::new(vec![4.0], 1.0).unwrap()).unwrap(), 0.0);
        assert_eq!(pohozaev_residual(&swap(), &MassVector::new(vec![4.0, 4.0], 1.0).unwrap()).unwrap(), 0.0);
        assert_eq!(pohozaev_residual(&swap(), &MassVector::new(vec![0.0, 0.0], 1.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn hypersurface_examples() {
        assert_eq!(solve_mass_on_hypersurface(&scalar(), 1.0, &[1.0]).unwrap().sigma, vec![4.0]);
        assert_eq!(solve_mass_on_hypersurface(&swap(), 1.0, &[1.0, 1.0]).unwrap().sigma, vec![4.0, 4.0]);
        assert_eq!(solve_mass_on_hypersurface(&scalar(), 2.0, &[1.0]).unwrap().sigma, vec![8.0]);
        let zero = InteractionMatrix::new(&[vec![0.0]]).unwrap();
        assert!(matches!(solve_mass_on_hypersurface(&zero, 1.0, &[1.0]), Err(Error::DegenerateDirection(_))));
        assert!(solve_mass_on_hypersurface(&swap(), 1.0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn minimal_mass_examples() {
        assert!(minimal_mass_check(&scalar(), &MassVector::new(vec![4.0], 1.0).unwrap()).unwrap().holds);

        let r = minimal_mass_check(&swap(), &MassVector::new(vec![4.0, 0.0], 1.0).unwrap()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].indices, vec![0]);
        assert_eq!(r.violations[0].value, 0.0);

        let r = minimal_mass_check(&swap(), &MassVector::new(vec![0.0, 0.0], 1.0).unwrap()).unwrap();
        assert_eq!(r.violations.len(), 2);
    }

    #[test]
    fn scaling_between_points() {
        let p = MassVector::new(vec![4.0, 4.0], 1.0).unwrap();
        let q = energy_scaling_between_points(&p, 2.0).unwrap();
        assert_eq!(q.sigma, vec![8.0, 8.0]);
        assert_eq!(q.mu, 2.0);
        assert_eq!(pohozaev_residual(&swap(), &q).unwrap(), 0.0);
        assert_eq!(energy_scaling_between_points(&p, 1.0).unwrap(), p);
    }

    #[test]
    fn nonsimple_admissibility() {
        assert!(nonsimple_blowup_admissible(2.0, DEFAULT_INTEGER_TOL));
        assert!(!nonsimple_blowup_admissible(0.5, DEFAULT_INTEGER_TOL));
        assert!(nonsimple_blowup_admissible(0.0, DEFAULT_INTEGER_TOL));
        assert!(!nonsimple_blowup_admissible(-0.5, DEFAULT_INTEGER_TOL));
        assert!(nonsimple_blowup_admissible(1.0 + 1e-12, DEFAULT_INTEGER_TOL));
    }

    #[test]
    fn mass_split_examples() {
        assert_eq!(local_mass_split(&[2.0 * PI], &[1.0, 1.0]).unwrap(), vec![vec![0.5, 0.5]]);
        let single = local_mass_split(&[3.0, 5.0], &[2.5]).unwrap();
        assert!((single[0][0] - 3.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((single[1][0] - 5.0 / (2.0 * PI)).abs() < 1e-15);
        let split = local_mass_split(&[4.0 * PI], &[1.0, 3.0]).unwrap();
        assert!((split[0][0] - 0.5).abs() < 1e-15 && (split[0][1] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn critical_surface_examples() {
        assert!(critical_surface_from_blowup(&scalar(), &[8.0 * PI], &[1.0]).unwrap().abs() < 1e-10);
        let r = critical_surface_from_blowup(&scalar(), &[24.0 * PI], &[1.0, 2.0]).unwrap();
        assert!(r.abs() <= 1e-10 * (24.0 * PI).powi(2));
        assert!(critical_surface_from_blowup(&scalar(), &[25.0 * PI], &[1.0, 2.0]).unwrap() > 0.0);
        assert!(critical_surface_from_blowup(&scalar(), &[23.0 * PI], &[1.0, 2.0]).unwrap() < 0.0);
        assert_eq!(critical_surface_from_blowup(&scalar(), &[0.0], &[1.0]), Err(Error::ZeroMass(0.0)));
    }
}
