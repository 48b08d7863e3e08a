//! Numerical treatment of the regularized system
//!
//! ```text
//! Δu_i + Σ_j a_ij ρ_j (h_j e^{u_j} / ∫ h_j e^{u_j} − 1) = 0
//! ```
//!
//! on the unit flat torus `[0,1)²` with mean-zero unknowns. Derivatives are
//! spectral, integrals use the equal-weight grid rule (volume 1, weight
//! `1/M²` per node).

mod dump;
mod gmres;
mod solver;
pub mod spectral;

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::degree::ProblemInstance;
use crate::error::{Error, Result};
use crate::spectrum::SingularitySet;

pub use dump::{read_field_binary, write_field_binary, write_field_csv};
pub use solver::{solve_continuation, verify_solution, SolveOutcome, SolverOptions, StepLog, VerificationReport};
pub use spectral::Spectral;

pub const DEFAULT_RESOLUTION: usize = 64;

#[derive(Debug, Clone)]
pub struct TorusGrid {
    m: usize,
    spectral: Spectral,
}

impl TorusGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("resolution {m} must be an even integer >= 4")));
        }
        Ok(Self { m, spectral: Spectral::new(m) })
    }

    /// Points per axis.
    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// Node `(a, b)` sits at `(a/M, b/M)`; storage index `a·M + b`.
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let m = self.m as f64;
        [(idx / self.m) as f64 / m, (idx % self.m) as f64 / m]
    }

    pub fn nodes(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Equal-weight quadrature `∫ f ≈ M⁻² Σ f(x_a)`.
    pub fn mean(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() / self.len() as f64
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / self.len() as f64
    }

    pub fn l2_norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }
}

/// `n` grid functions `u_1, …, u_n` (row-major, `M²` values each).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    pub resolution: usize,
    pub values: Vec<Vec<f64>>,
}

impl FieldSet {
    pub fn zeros(n: usize, grid: &TorusGrid) -> Self {
        Self { resolution: grid.resolution(), values: vec![vec![0.0; grid.len()]; n] }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Subtract each component's grid mean.
    pub fn project_mean_zero(&mut self) {
        for v in &mut self.values {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.iter_mut().for_each(|x| *x -= mean);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sqrt(Σ_i ∫ u_i²)`.
    pub fn l2_norm(&self) -> f64 {
        let len = (self.resolution * self.resolution) as f64;
        (self.values.iter().flatten().map(|v| v * v).sum::<f64>() / len).sqrt()
    }

    fn check(&self, n: usize, grid: &TorusGrid) -> Result<()> {
        if self.values.len() != n || self.resolution != grid.resolution() || self.values.iter().any(|v| v.len() != grid.len()) {
            return Err(Error::InvalidInput(format!(
                "field set shape ({} x {}) does not match system size {n} on a {}^2 grid",
                self.values.len(),
                self.resolution,
                grid.resolution()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigMode {
    pub amplitude: f64,
    pub k: [i32; 2],
    #[serde(default)]
    pub phase: f64,
}

/// `g(x) = base + Σ amplitude · sin(2π k·x + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothFactor {
    pub base: f64,
    #[serde(default)]
    pub modes: Vec<TrigMode>,
}

impl SmoothFactor {
    pub fn constant(base: f64) -> Self {
        Self { base, modes: Vec::new() }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.base
            + self
                .modes
                .iter()
                .map(|md| md.amplitude * (2.0 * PI * (md.k[0] as f64 * x[0] + md.k[1] as f64 * x[1]) + md.phase).sin())
                .sum::<f64>()
    }

    /// The same factor translated by `shift`: `g'(x) = g(x − shift)`.
    pub fn translated(&self, shift: [f64; 2]) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|md| TrigMode {
                phase: md.phase - 2.0 * PI * (md.k[0] as f64 * shift[0] + md.k[1] as f64 * shift[1]),
                ..*md
            })
            .collect();
        Self { base: self.base, modes }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    /// One factor per component; empty means `g_i ≡ 1`.
    pub smooth_factors: Vec<SmoothFactor>,
    pub singularities: SingularitySet,
}

impl WeightSpec {
    pub fn uniform(singularities: SingularitySet) -> Self {
        Self { smooth_factors: Vec::new(), singularities }
    }
}

/// Periodic weight `(sin²(πz₁) + sin²(πz₂))/π²`, which behaves like `|z|²`
/// near the origin.
pub fn periodic_weight(z: [f64; 2]) -> f64 {
    let s1 = (PI * z[0]).sin();
    let s2 = (PI * z[1]).sin();
    (s1 * s1 + s2 * s2) / (PI * PI)
}

/// `h_i(x) = g_i(x) Π_l w(x − p_l)^{γ_l}` sampled on the grid.
pub fn build_weights(w: &WeightSpec, n: usize, grid: &TorusGrid) -> Result<Vec<Vec<f64>>> {
    let s = &w.singularities;
    for (index, &value) in s.gammas().iter().enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeGamma { index, value });
        }
    }
    let positions = match s.positions() {
        Some(p) => p,
        None if s.is_empty() => &[],
        None => return Err(Error::InvalidInput("torus sources need positions".into())),
    };
    if !w.smooth_factors.is_empty() && w.smooth_factors.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} smooth factors given for {n} components",
            w.smooth_factors.len()
        )));
    }
    let singular: Vec<f64> = grid
        .nodes()
        .map(|x| {
            positions
                .iter()
                .zip(s.gammas())
                .map(|(p, &g)| periodic_weight([x[0] - p[0], x[1] - p[1]]).powf(g))
                .product()
        })
        .collect();
    (0..n)
        .map(|i| {
            let factor = w.smooth_factors.get(i);
            grid.nodes()
                .zip(&singular)
                .map(|(x, &sing)| {
                    let g = factor.map_or(1.0, |f| f.eval(x));
                    if !(g > 0.0) {
                        return Err(Error::InvalidInput(format!(
                            "smooth factor {i} is not positive at {x:?} (value {g})"
                        )));
                    }
                    Ok(g * sing)
                })
                .collect()
        })
        .collect()
}

/// Truncated Fourier series of the Green's function,
/// `G(x, q) = Σ_{k≠0} e^{2πi k·(x−q)} / (4π²|k|²)`, over the grid modes with the
/// Nyquist modes symmetrized: the result is real and even in `x − q`.
pub fn green_function(grid: &TorusGrid, q: [f64; 2]) -> Vec<f64> {
    let m = grid.resolution();
    let sp = grid.spectral();
    let phase = |idx: usize, qc: f64| -> Complex<f64> {
        let k = spectral::wavenumber(idx, m);
        if k == -(m as i64) / 2 {
            Complex::new((PI * m as f64 * qc).cos(), 0.0)
        } else {
            Complex::from_polar(1.0, -2.0 * PI * k as f64 * qc)
        }
    };
    let p1: Vec<_> = (0..m).map(|a| phase(a, q[0])).collect();
    let p2: Vec<_> = (0..m).map(|b| phase(b, q[1])).collect();
    let mut coeffs = vec![Complex::new(0.0, 0.0); m * m];
    for a in 0..m {
        for b in 0..m {
            let s = sp.symbol()[a * m + b];
            if s > 0.0 {
                coeffs[a * m + b] = p1[a] * p2[b] / s;
            }
        }
    }
    sp.inverse_raw(coeffs).into_iter().map(|c| c.re).collect()
}

/// Normalized densities `w_j = h_j e^{u_j} / ⟨h_j e^{u_j}⟩` and `log ⟨h_j e^{u_j}⟩`.
pub(crate) fn densities(u: &FieldSet, h: &[Vec<f64>], grid: &TorusGrid) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut dens = Vec::with_capacity(u.n());
    let mut logs = Vec::with_capacity(u.n());
    for (j, (uj, hj)) in u.values.iter().zip(h).enumerate() {
        let shift = uj.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let raw: Vec<f64> = uj.iter().zip(hj).map(|(&v, &w)| w * (v - shift).exp()).collect();
        let mean = grid.mean(&raw);
        if !(mean > 0.0) || !mean.is_finite() {
            return Err(Error::ZeroMassDensity { component: j, value: mean });
        }
        dens.push(raw.into_iter().map(|v| v / mean).collect());
        logs.push(shift + mean.ln());
    }
    Ok((dens, logs))
}

fn check_shapes(u: &FieldSet, p: &ProblemInstance, h: &[Vec<f64>], grid: &TorusGrid) -> Result<()> {
    let n = p.matrix.n();
    u.check(n, grid)?;
    if h.len() != n || h.iter().any(|v| v.len() != grid.len()) {
        return Err(Error::InvalidInput("weights do not match the system and grid".into()));
    }
    Ok(())
}

pub(crate) fn residual_with_rho(
    u: &FieldSet,
    a: &crate::matrix::InteractionMatrix,
    rho: &[f64],
    h: &[Vec<f64>],
    grid: &TorusGrid,
) -> Result<FieldSet> {
    let (dens, _) = densities(u, h, grid)?;
    let sp = grid.spectral();
    let n = a.n();
    let values = (0..n)
        .map(|i| {
            let mut r = sp.laplacian(&u.values[i]);
            for j in 0..n {
                let c = a.get(i, j) * rho[j];
                if c != 0.0 {
                    r.iter_mut().zip(&dens[j]).for_each(|(ri, wj)| *ri += c * (wj - 1.0));
                }
            }
            r
        })
        .collect();
    Ok(FieldSet { resolution: grid.resolution(), values })
}

/// `R_i = Δu_i + Σ_j a_ij ρ_j (h_j e^{u_j}/⟨h_j e^{u_j}⟩ − 1)`.
pub fn residual(u: &FieldSet, p: &ProblemInstance, h: &[Vec<f64>], grid: &TorusGrid) -> Result<FieldSet> {
    check_shapes(u, p, h, grid)?;
    residual_with_rho(u, &p.matrix, &p.rho, h, grid)
}

/// `J_ρ(u) = ½ Σ a^{ij} ∫ ∇u_i·∇u_j − Σ ρ_i log ∫ h_i e^{u_i}`.
pub fn functional_j(u: &FieldSet, p: &ProblemInstance, h: &[Vec<f64>], grid: &TorusGrid) -> Result<f64> {
    check_shapes(u, p, h, grid)?;
    let inv = p.matrix.inverse()?;
    let n = p.matrix.n();
    let sp = grid.spectral();
    let hats: Vec<_> = u.values.iter().map(|v| sp.forward(v)).collect();
    let mut energy = 0.0;
    for i in 0..n {
        for j in 0..n {
            let c = inv[i * n + j];
            if c != 0.0 {
                energy += c * sp.gradient_inner(&hats[i], &hats[j]);
            }
        }
    }
    let (_, logs) = densities(u, h, grid)?;
    Ok(0.5 * energy - p.rho.iter().zip(&logs).map(|(r, l)| r * l).sum::<f64>())
}

/// Mean-zero L² gradient of `J_ρ`:
/// `G_i = Σ_j a^{ij}(−Δu_j) − ρ_i (w_i − 1)`. Applying `A` gives `−R`.
pub fn functional_gradient(u: &FieldSet, p: &ProblemInstance, h: &[Vec<f64>], grid: &TorusGrid) -> Result<FieldSet> {
    check_shapes(u, p, h, grid)?;
    let inv = p.matrix.inverse()?;
    let n = p.matrix.n();
    let sp = grid.spectral();
    let neg_lap: Vec<Vec<f64>> = u
        .values
        .iter()
        .map(|v| sp.laplacian(v).into_iter().map(|x| -x).collect())
        .collect();
    let (dens, _) = densities(u, h, grid)?;
    let values = (0..n)
        .map(|i| {
            let mut g: Vec<f64> = dens[i].iter().map(|w| -p.rho[i] * (w - 1.0)).collect();
            for j in 0..n {
                let c = inv[i * n + j];
                g.iter_mut().zip(&neg_lap[j]).for_each(|(gi, l)| *gi += c * l);
            }
            g
        })
        .collect();
    Ok(FieldSet { resolution: grid.resolution(), values })
}
