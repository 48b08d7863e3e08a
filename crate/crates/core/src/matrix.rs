//! Coupling matrix of the system and the structural hypotheses on it.
//!
//! (H1): `A` is symmetric, entrywise non-negative, irreducible and invertible.
//! (H2): the inverse `A⁻¹ = (a^{ij})` has a non-positive diagonal, non-negative
//! off-diagonal entries and non-negative row sums.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the sign and symmetry checks.
pub const DEFAULT_TOL: f64 = 1e-10;
/// 1-norm condition number beyond which a matrix is treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Largest supported system size.
pub const MAX_SIZE: usize = 64;

#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    n: usize,
    entries: Vec<f64>,
    inverse: OnceLock<Result<Vec<f64>>>,
}

impl InteractionMatrix {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("matrix must have at least one row".into()));
        }
        if n > MAX_SIZE {
            return Err(Error::InvalidInput(format!(
                "matrix size {n} exceeds the supported maximum {MAX_SIZE}"
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("matrix entry ({i},{j}) is not finite")));
            }
            entries.extend_from_slice(row);
        }
        Ok(Self { n, entries, inverse: OnceLock::new() })
    }

    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        let rows: Vec<Vec<f64>> = entries.chunks(n).map(|r| r.to_vec()).collect();
        Self::new(&rows)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries, inverse: OnceLock::new() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Max-norm `max |a_ij|`.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|v| v * c).collect(),
            inverse: OnceLock::new(),
        }
    }

    /// Simultaneous row/column permutation: `B[i][j] = A[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Ok(Self { n, entries, inverse: OnceLock::new() })
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Quadratic form `Σ a_ij x_i x_j`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Inverse `(a^{ij})` in row-major order, computed once and cached.
    pub fn inverse(&self) -> Result<&[f64]> {
        match self.inverse.get_or_init(|| invert_dense(self.n, &self.entries)) {
            Ok(inv) => Ok(inv.as_slice()),
            Err(e) => Err(e.clone()),
        }
    }

    /// Row sums `Σ_j a^{ij}` of the inverse.
    pub fn inverse_row_sums(&self) -> Result<Vec<f64>> {
        let inv = self.inverse()?;
        Ok(inv.chunks(self.n).map(|r| r.iter().sum()).collect())
    }

    /// `A⁻¹ x`.
    pub fn apply_inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        let inv = self.inverse()?;
        Ok(inv
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

impl PartialEq for InteractionMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

/// Gauss-Jordan elimination with partial pivoting.
fn invert_dense(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut work = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::SingularMatrix("zero matrix".into()));
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| work[r * n + col].abs().total_cmp(&work[s * n + col].abs()))
            .expect("non-empty pivot range");
        let pivot = work[pivot_row * n + col];
        if pivot.abs() <= f64::EPSILON * scale {
            return Err(Error::SingularMatrix(format!("zero pivot in column {col}")));
        }
        if pivot_row != col {
            for k in 0..n {
                work.swap(col * n + k, pivot_row * n + k);
                inv.swap(col * n + k, pivot_row * n + k);
            }
        }
        let p = work[col * n + col];
        for k in 0..n {
            work[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = work[r * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                work[r * n + k] -= f * work[col * n + k];
                inv[r * n + k] -= f * inv[col * n + k];
            }
        }
    }

    let cond = norm_1(n, a) * norm_1(n, &inv);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::SingularMatrix(format!("condition number {cond:e} exceeds {CONDITION_LIMIT:e}")));
    }
    let residual = identity_residual(n, a, &inv);
    if residual > 1e-10 * scale {
        return Err(Error::SingularMatrix(format!("inverse residual {residual:e} too large")));
    }
    Ok(inv)
}

fn norm_1(n: usize, m: &[f64]) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| m[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `max |(A B − I)_ij|`.
pub fn identity_residual(n: usize, a: &[f64], b: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let mut s: f64 = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
            if i == j {
                s -= 1.0;
            }
            worst = worst.max(s.abs());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub indices: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub violations: Vec<Violation>,
}

impl ConditionReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Self { holds: violations.is_empty(), violations }
    }

    pub fn merge(mut self, other: ConditionReport) -> Self {
        self.violations.extend(other.violations);
        self.holds = self.violations.is_empty();
        self
    }

    fn push(&mut self, condition: &str, indices: Vec<usize>, value: f64) {
        self.violations.push(Violation { condition: condition.to_string(), indices, value });
        self.holds = false;
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds {
            return write!(f, "holds");
        }
        write!(f, "fails:")?;
        for v in &self.violations {
            write!(f, " {}{:?}={:e}", v.condition, v.indices, v.value)?;
        }
        Ok(())
    }
}

/// Connectivity of the graph with an edge `i–j` whenever `a_ij ≠ 0` or
/// `a_ji ≠ 0`, `i ≠ j`.
pub fn irreducible(a: &InteractionMatrix) -> bool {
    let n = a.n();
    let mut visited = vec![false; n];
    let mut stack = vec![0];
    visited[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !visited[j] && i != j && (a.get(i, j).abs() > 0.0 || a.get(j, i).abs() > 0.0) {
                visited[j] = true;
                stack.push(j);
            }
        }
    }
    visited.into_iter().all(|v| v)
}

pub fn check_h1(a: &InteractionMatrix, tol: f64) -> ConditionReport {
    let n = a.n();
    let mut report = ConditionReport::from_violations(Vec::new());
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (a.get(i, j) - a.get(j, i)).abs();
            if d > tol {
                report.push("symmetric", vec![i, j], d);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j) < -tol {
                report.push("nonnegative", vec![i, j], a.get(i, j));
            }
        }
    }
    if !irreducible(a) {
        report.push("irreducible", Vec::new(), 0.0);
    }
    if a.inverse().is_err() {
        report.push("invertible", Vec::new(), 0.0);
    }
    report
}

pub fn check_h2(a: &InteractionMatrix, tol: f64) -> Result<ConditionReport> {
    let n = a.n();
    let inv = a.inverse()?;
    let mut report = ConditionReport::from_violations(Vec::new());
    for i in 0..n {
        let d = inv[i * n + i];
        if d > tol {
            report.push("inverse_diagonal_nonpositive", vec![i, i], d);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = inv[i * n + j];
            if i != j && v < -tol {
                report.push("inverse_offdiagonal_nonnegative", vec![i, j], v);
            }
        }
    }
    for (i, row) in inv.chunks(n).enumerate() {
        let s: f64 = row.iter().sum();
        if s < -tol {
            report.push("inverse_row_sum_nonnegative", vec![i], s);
        }
    }
    Ok(report)
}

/// Combined gate used before any degree computation: (H1), plus (H2) for
/// systems with `n ≥ 2`. A single equation (`n = 1`, `a_11 > 0`) is the scalar
/// mean-field case, for which the sign conditions on the inverse are not
/// imposed.
pub fn check_hypotheses(a: &InteractionMatrix, tol: f64) -> ConditionReport {
    let mut report = check_h1(a, tol);
    if a.n() == 1 {
        if a.get(0, 0) <= 0.0 {
            report.push("positive_scalar_coupling", vec![0, 0], a.get(0, 0));
        }
        return report;
    }
    match check_h2(a, tol) {
        Ok(h2) => report.merge(h2),
        // already recorded as "invertible" by (H1)
        Err(_) => report,
    }
}
