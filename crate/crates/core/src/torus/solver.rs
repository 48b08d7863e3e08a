//! Continuation in `ρ` with damped Newton steps.
//!
//! Each Newton correction solves the Jacobian system left-preconditioned by
//! the inverse Laplacian, so GMRES sees identity plus a compact term.

use serde::{Deserialize, Serialize};

use super::gmres::gmres;
use super::{build_weights, densities, functional_j, residual, residual_with_rho, FieldSet, TorusGrid, WeightSpec};
use crate::degree::ProblemInstance;
use crate::error::{Error, Result};
use crate::spectrum::{enumerate_spectrum, DEFAULT_MERGE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Target `‖R‖_{L²}` at every continuation step.
    pub tol: f64,
    /// Number of continuation parameters `t_0 < … < t_{steps−1} = 1`.
    pub steps: usize,
    pub t0: f64,
    pub max_newton: usize,
    pub linear_tol: f64,
    pub max_krylov: usize,
    pub damping_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            steps: 10,
            t0: 0.1,
            max_newton: 50,
            linear_tol: 1e-10,
            max_krylov: 200,
            damping_floor: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn parameters(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![1.0];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| if k + 1 == self.steps { 1.0 } else { self.t0 + (1.0 - self.t0) * k as f64 / last })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub step: usize,
    pub t: f64,
    pub newton_iterations: usize,
    pub residual_history: Vec<f64>,
    pub max_abs_u: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub u: FieldSet,
    pub steps: Vec<StepLog>,
    pub final_residual: f64,
}

pub fn solve_continuation(
    p: &ProblemInstance,
    w: &WeightSpec,
    grid: &TorusGrid,
    opts: &SolverOptions,
) -> Result<SolveOutcome> {
    if w.singularities.gammas() != p.singularities.gammas() {
        return Err(Error::InvalidInput("weight sources differ from the instance sources".into()));
    }
    if opts.steps == 0 || !(opts.t0 > 0.0 && opts.t0 <= 1.0) || !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("solver options out of range".into()));
    }
    let n = p.matrix.n();
    let h = build_weights(w, n, grid)?;
    let q = p.normalized_energy()?;
    let first_level = enumerate_spectrum(&p.singularities, 2.0, DEFAULT_MERGE_TOL)?.levels[0];
    if q >= first_level {
        return Err(Error::NotSubcritical { q, first_level });
    }

    let mut u = FieldSet::zeros(n, grid);
    let mut logs = Vec::with_capacity(opts.steps);
    let mut final_residual = 0.0;
    for (step, t) in opts.parameters().into_iter().enumerate() {
        let rho: Vec<f64> = p.rho.iter().map(|r| t * r).collect();
        let log = newton(&mut u, p, &rho, &h, grid, opts, step, t)?;
        final_residual = *log.residual_history.last().expect("history holds the initial residual");
        logs.push(log);
    }
    Ok(SolveOutcome { u, steps: logs, final_residual })
}

fn mean_zero_residual(
    u: &FieldSet,
    p: &ProblemInstance,
    rho: &[f64],
    h: &[Vec<f64>],
    grid: &TorusGrid,
) -> Option<FieldSet> {
    let mut r = residual_with_rho(u, &p.matrix, rho, h, grid).ok()?;
    r.project_mean_zero();
    r.values.iter().flatten().all(|v| v.is_finite()).then_some(r)
}

#[allow(clippy::too_many_arguments)]
fn newton(
    u: &mut FieldSet,
    p: &ProblemInstance,
    rho: &[f64],
    h: &[Vec<f64>],
    grid: &TorusGrid,
    opts: &SolverOptions,
    step: usize,
    t: f64,
) -> Result<StepLog> {
    let n = p.matrix.n();
    let len = grid.len();
    let sp = grid.spectral();
    let mut r = mean_zero_residual(u, p, rho, h, grid).ok_or(Error::ZeroMassDensity { component: 0, value: 0.0 })?;
    let mut norm = r.l2_norm();
    let mut history = vec![norm];
    let mut iterations = 0;

    while norm > opts.tol {
        if iterations >= opts.max_newton {
            return Err(Error::NoConvergence { step, iterations, residual: norm });
        }
        iterations += 1;

        let (dens, _) = densities(u, h, grid)?;
        let coupling: Vec<f64> = (0..n * n).map(|ij| p.matrix.get(ij / n, ij % n) * rho[ij % n]).collect();
        let op = |delta: &[f64]| -> Vec<f64> {
            // w_j (δ_j − ⟨w_j δ_j⟩)
            let pert: Vec<Vec<f64>> = (0..n)
                .map(|j| {
                    let dj = &delta[j * len..(j + 1) * len];
                    let avg = grid.inner(&dens[j], dj);
                    dens[j].iter().zip(dj).map(|(w, d)| w * (d - avg)).collect()
                })
                .collect();
            let mut out = delta.to_vec();
            for i in 0..n {
                let mut acc = vec![0.0; len];
                for j in 0..n {
                    let c = coupling[i * n + j];
                    if c != 0.0 {
                        acc.iter_mut().zip(&pert[j]).for_each(|(a, v)| *a += c * v);
                    }
                }
                let corr = sp.inverse_laplacian(&acc);
                out[i * len..(i + 1) * len].iter_mut().zip(corr).for_each(|(o, c)| *o += c);
            }
            out
        };
        let rhs: Vec<f64> = r.values.iter().flat_map(|ri| sp.inverse_laplacian(ri).into_iter().map(|v| -v)).collect();
        let solved = gmres(op, &rhs, opts.linear_tol, opts.max_krylov);

        let mut delta = FieldSet {
            resolution: grid.resolution(),
            values: solved.x.chunks(len).map(|c| c.to_vec()).collect(),
        };
        delta.project_mean_zero();

        let mut lambda = 1.0;
        loop {
            let mut trial = u.clone();
            for (tv, dv) in trial.values.iter_mut().zip(&delta.values) {
                tv.iter_mut().zip(dv).for_each(|(a, d)| *a += lambda * d);
            }
            trial.project_mean_zero();
            if let Some(rt) = mean_zero_residual(&trial, p, rho, h, grid) {
                let nt = rt.l2_norm();
                if nt <= (1.0 - 1e-4 * lambda) * norm {
                    *u = trial;
                    r = rt;
                    norm = nt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < opts.damping_floor {
                return Err(Error::StepFailure { step, floor: opts.damping_floor, residual: norm });
            }
        }
        history.push(norm);
    }
    Ok(StepLog { step, t, newton_iterations: iterations, residual_history: history, max_abs_u: u.max_abs() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residual_l2: Vec<f64>,
    pub residual_max: Vec<f64>,
    /// `⟨R_i, 1⟩`.
    pub residual_means: Vec<f64>,
    pub mean_defects: Vec<f64>,
    /// `⟨h_i e^{v_i}⟩` with `v_i = u_i − log⟨h_i e^{u_i}⟩`.
    pub masses: Vec<f64>,
    pub functional: f64,
}

pub fn verify_solution(u: &FieldSet, p: &ProblemInstance, w: &WeightSpec, grid: &TorusGrid) -> Result<VerificationReport> {
    let h = build_weights(w, p.matrix.n(), grid)?;
    let r = residual(u, p, &h, grid)?;
    let (_, logs) = densities(u, &h, grid)?;
    let masses = u
        .values
        .iter()
        .zip(&h)
        .zip(&logs)
        .map(|((ui, hi), l)| grid.mean(&ui.iter().zip(hi).map(|(v, w)| w * (v - l).exp()).collect::<Vec<_>>()))
        .collect();
    Ok(VerificationReport {
        residual_l2: r.values.iter().map(|v| grid.l2_norm(v)).collect(),
        residual_max: r.values.iter().map(|v| v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))).collect(),
        residual_means: r.values.iter().map(|v| grid.mean(v)).collect(),
        mean_defects: u.values.iter().map(|v| grid.mean(v)).collect(),
        masses,
        functional: functional_j(u, p, &h, grid)?,
    })
}
