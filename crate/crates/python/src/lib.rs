//! Python bindings for `liouville_core`.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use liouville_core as core;
use liouville_core::degree::{ProblemInstance, SurfaceSpec};
use liouville_core::spectrum::{SingularitySet, DEFAULT_MERGE_TOL};
use liouville_core::torus::{FieldSet, SolverOptions, TorusGrid, WeightSpec};

create_exception!(liouville, LiouvilleError, PyValueError, "Base class for errors raised by liouville.");
create_exception!(liouville, HypothesisViolation, LiouvilleError, "The coupling matrix fails (H1) or (H2).");
create_exception!(liouville, OnCriticalSurface, LiouvilleError, "The parameter lies on a critical level.");
create_exception!(liouville, SolverFailure, LiouvilleError, "Newton iteration did not converge.");

fn to_py(err: core::Error) -> PyErr {
    let msg = err.to_string();
    match err {
        core::Error::HypothesisViolation(_) => HypothesisViolation::new_err(msg),
        core::Error::OnCriticalSurface { .. } => OnCriticalSurface::new_err(msg),
        core::Error::NoConvergence { .. } | core::Error::StepFailure { .. } => SolverFailure::new_err(msg),
        _ => LiouvilleError::new_err(msg),
    }
}

type Violations = Vec<(String, Vec<usize>, f64)>;

fn report(r: core::ConditionReport) -> (bool, Violations) {
    let v = r.violations.into_iter().map(|v| (v.condition, v.indices, v.value)).collect();
    (r.holds, v)
}

/// Symmetric coupling matrix with a cached inverse.
#[pyclass(frozen, module = "liouville")]
struct InteractionMatrix {
    inner: core::InteractionMatrix,
}

#[pymethods]
impl InteractionMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self { inner: core::InteractionMatrix::new(&rows).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows()
    }

    fn inverse(&self) -> PyResult<Vec<Vec<f64>>> {
        let n = self.inner.n();
        Ok(self.inner.inverse().map_err(to_py)?.chunks(n).map(<[f64]>::to_vec).collect())
    }

    /// `(holds, [(condition, indices, value), ...])`
    #[pyo3(signature = (tol = core::matrix::DEFAULT_TOL))]
    fn check_h1(&self, tol: f64) -> (bool, Violations) {
        report(core::check_h1(&self.inner, tol))
    }

    #[pyo3(signature = (tol = core::matrix::DEFAULT_TOL))]
    fn check_h2(&self, tol: f64) -> PyResult<(bool, Violations)> {
        Ok(report(core::check_h2(&self.inner, tol).map_err(to_py)?))
    }

    #[pyo3(signature = (tol = core::matrix::DEFAULT_TOL))]
    fn check_hypotheses(&self, tol: f64) -> (bool, Violations) {
        report(core::check_hypotheses(&self.inner, tol))
    }

    fn __repr__(&self) -> String {
        format!("InteractionMatrix({:?})", self.inner.rows())
    }
}

#[pyclass(frozen, get_all, module = "liouville")]
struct DegreeResult {
    degree: i64,
    region: usize,
    q: f64,
    nearest_levels: (f64, f64),
    partial_coefficients: Vec<i64>,
}

#[pymethods]
impl DegreeResult {
    fn __repr__(&self) -> String {
        format!("DegreeResult(degree={}, region={}, q={})", self.degree, self.region, self.q)
    }
}

#[pyclass(frozen, get_all, module = "liouville")]
struct SolveResult {
    /// `u[i][a*M + b]` at node `(a/M, b/M)`.
    u: Vec<Vec<f64>>,
    resolution: usize,
    final_residual: f64,
    newton_iterations: Vec<usize>,
    residual_l2: Vec<f64>,
    masses: Vec<f64>,
    functional: f64,
}

fn singularities(gammas: Vec<f64>, positions: Option<Vec<[f64; 2]>>) -> PyResult<SingularitySet> {
    match positions {
        Some(p) => SingularitySet::with_positions(gammas, p),
        None => SingularitySet::new(gammas),
    }
    .map_err(to_py)
}

fn surface(chi: Option<i64>, genus: Option<u32>) -> PyResult<SurfaceSpec> {
    match (chi, genus) {
        (Some(c), None) => Ok(SurfaceSpec::with_chi(c)),
        (None, Some(g)) => Ok(SurfaceSpec::closed(g)),
        (None, None) => Ok(SurfaceSpec::torus()),
        _ => Err(LiouvilleError::new_err("give either chi or genus, not both")),
    }
}

/// Critical levels in `(0, cap]`, in units of 8π.
#[pyfunction]
#[pyo3(signature = (gammas, cap = 20.0, merge_tol = DEFAULT_MERGE_TOL))]
fn critical_spectrum(gammas: Vec<f64>, cap: f64, merge_tol: f64) -> PyResult<Vec<f64>> {
    let s = SingularitySet::new(gammas).map_err(to_py)?;
    Ok(core::enumerate_spectrum(&s, cap, merge_tol).map_err(to_py)?.levels)
}

/// `[(exponent, coefficient), ...]` of the generating function up to `cap`.
#[pyfunction]
#[pyo3(signature = (chi, gammas, cap = 20.0, merge_tol = DEFAULT_MERGE_TOL))]
fn generating_function(chi: i64, gammas: Vec<f64>, cap: f64, merge_tol: f64) -> PyResult<Vec<(f64, i64)>> {
    let s = SingularitySet::new(gammas).map_err(to_py)?;
    let g = core::build_generating_function(chi, &s, cap, merge_tol).map_err(to_py)?;
    Ok(g.entries().into_iter().map(|e| (e.exponent, e.coefficient)).collect())
}

#[pyfunction]
#[pyo3(signature = (matrix, rho, gammas = Vec::new(), chi = None, genus = None, cap = 20.0, tol = 1e-8))]
#[allow(clippy::too_many_arguments)]
fn degree(
    matrix: &InteractionMatrix,
    rho: Vec<f64>,
    gammas: Vec<f64>,
    chi: Option<i64>,
    genus: Option<u32>,
    cap: f64,
    tol: f64,
) -> PyResult<DegreeResult> {
    let s = SingularitySet::new(gammas).map_err(to_py)?;
    let p = ProblemInstance::new(surface(chi, genus)?, s, matrix.inner.clone(), rho).map_err(to_py)?;
    let d = core::leray_schauder_degree(&p, cap, tol).map_err(to_py)?;
    Ok(DegreeResult {
        degree: d.degree,
        region: d.region_k,
        q: d.q_normalized,
        nearest_levels: d.nearest_levels,
        partial_coefficients: d.partial_coefficients,
    })
}

/// `(degree, rho, q)` for positive integer strengths with odd sum on the torus.
#[pyfunction]
fn torus_special_degree(gammas: Vec<f64>, matrix: &InteractionMatrix) -> PyResult<(i64, Vec<f64>, f64)> {
    let s = SingularitySet::new(gammas).map_err(to_py)?;
    let t = core::torus_special_degree(&s, &matrix.inner).map_err(to_py)?;
    Ok((t.degree, t.rho, t.q))
}

#[pyfunction]
fn normalized_energy(rho: Vec<f64>, matrix: &InteractionMatrix) -> PyResult<f64> {
    core::normalized_energy(&rho, &matrix.inner).map_err(to_py)
}

#[pyfunction]
fn pohozaev_residual(matrix: &InteractionMatrix, sigma: Vec<f64>, mu: f64) -> PyResult<f64> {
    let m = core::pohozaev::MassVector::new(sigma, mu).map_err(to_py)?;
    core::pohozaev::pohozaev_residual(&matrix.inner, &m).map_err(to_py)
}

#[pyfunction]
fn solve_mass_on_hypersurface(matrix: &InteractionMatrix, mu: f64, direction: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(core::pohozaev::solve_mass_on_hypersurface(&matrix.inner, mu, &direction).map_err(to_py)?.sigma)
}

#[pyfunction]
fn local_mass_split(rho: Vec<f64>, mus: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    core::pohozaev::local_mass_split(&rho, &mus).map_err(to_py)
}

#[pyfunction]
fn critical_surface_from_blowup(matrix: &InteractionMatrix, rho: Vec<f64>, mus: Vec<f64>) -> PyResult<f64> {
    core::pohozaev::critical_surface_from_blowup(&matrix.inner, &rho, &mus).map_err(to_py)
}

/// Solve on the flat torus. `smooth_factors` is a JSON list in the config
/// format, one entry per component.
#[pyfunction]
#[pyo3(signature = (matrix, rho, gammas = Vec::new(), positions = None, smooth_factors = None, resolution = 64, tol = 1e-8))]
#[allow(clippy::too_many_arguments)]
fn solve_torus(
    py: Python<'_>,
    matrix: &InteractionMatrix,
    rho: Vec<f64>,
    gammas: Vec<f64>,
    positions: Option<Vec<[f64; 2]>>,
    smooth_factors: Option<&str>,
    resolution: usize,
    tol: f64,
) -> PyResult<SolveResult> {
    let s = singularities(gammas, positions)?;
    let factors = match smooth_factors {
        Some(text) => serde_json::from_str(text).map_err(|e| LiouvilleError::new_err(format!("smooth_factors: {e}")))?,
        None => Vec::new(),
    };
    let w = WeightSpec { smooth_factors: factors, singularities: s.clone() };
    let p = ProblemInstance::new(SurfaceSpec::torus(), s, matrix.inner.clone(), rho).map_err(to_py)?;
    let grid = TorusGrid::new(resolution).map_err(to_py)?;
    let opts = SolverOptions { tol, ..Default::default() };
    let (out, check) = py
        .detach(|| {
            let out = core::torus::solve_continuation(&p, &w, &grid, &opts)?;
            let check = core::torus::verify_solution(&out.u, &p, &w, &grid)?;
            Ok::<_, core::Error>((out, check))
        })
        .map_err(to_py)?;
    let FieldSet { values, resolution } = out.u;
    Ok(SolveResult {
        u: values,
        resolution,
        final_residual: out.final_residual,
        newton_iterations: out.steps.iter().map(|s| s.newton_iterations).collect(),
        residual_l2: check.residual_l2,
        masses: check.masses,
        functional: check.functional,
    })
}

/// Green's function `G(x, q)` sampled on an `M × M` grid.
#[pyfunction]
fn green_function(resolution: usize, q: [f64; 2]) -> PyResult<Vec<f64>> {
    let grid = TorusGrid::new(resolution).map_err(to_py)?;
    Ok(core::torus::green_function(&grid, q))
}

#[pymodule]
fn liouville(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("LiouvilleError", py.get_type::<LiouvilleError>())?;
    m.add("HypothesisViolation", py.get_type::<HypothesisViolation>())?;
    m.add("OnCriticalSurface", py.get_type::<OnCriticalSurface>())?;
    m.add("SolverFailure", py.get_type::<SolverFailure>())?;
    m.add_class::<InteractionMatrix>()?;
    m.add_class::<DegreeResult>()?;
    m.add_class::<SolveResult>()?;
    m.add_function(wrap_pyfunction!(critical_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(generating_function, m)?)?;
    m.add_function(wrap_pyfunction!(degree, m)?)?;
    m.add_function(wrap_pyfunction!(torus_special_degree, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_energy, m)?)?;
    m.add_function(wrap_pyfunction!(pohozaev_residual, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mass_on_hypersurface, m)?)?;
    m.add_function(wrap_pyfunction!(local_mass_split, m)?)?;
    m.add_function(wrap_pyfunction!(critical_surface_from_blowup, m)?)?;
    m.add_function(wrap_pyfunction!(solve_torus, m)?)?;
    m.add_function(wrap_pyfunction!(green_function, m)?)?;
    Ok(())
}
