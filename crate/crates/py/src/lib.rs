//! Python bindings: states, ensembles, roof optimizers, the Choquet order
//! check, steering and the closed-form oracles.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use roof_core::choquet::{check_dominates, OrderStatus};
use roof_core::cli::{parse_selector, run_command};
use roof_core::functionals::LogBase;
use roof_core::io::{ensemble_value, parse_ensemble, parse_state, state_value, to_canonical_json};
use roof_core::linalg::{CMatrix, C64};
use roof_core::roof::{self, BoundDirection, RoofOptions};
use roof_core::states::{self as st, DensityMatrix};
use roof_core::Error;

fn to_py(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_base(base: &str) -> PyResult<LogBase> {
    match base {
        "2" => Ok(LogBase::Two),
        "e" => Ok(LogBase::E),
        _ => Err(PyValueError::new_err(format!("base must be \"2\" or \"e\", got {base:?}"))),
    }
}

fn options(restarts: usize, seed: u64, members: Option<usize>, tol: f64) -> RoofOptions {
    RoofOptions { restarts, seed, members, tol, ..RoofOptions::default() }
}

/// Density matrix, optionally with bipartite dimensions.
#[pyclass(name = "State", module = "choquet_roof", frozen, from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: DensityMatrix,
}

#[pymethods]
impl PyState {
    /// Builds a state from a square matrix of complex numbers.
    #[new]
    #[pyo3(signature = (matrix, dims = None))]
    fn new(matrix: Vec<Vec<C64>>, dims: Option<(usize, usize)>) -> PyResult<Self> {
        let m = CMatrix::from_rows(&matrix).map_err(to_py)?;
        let mut rho = DensityMatrix::from_matrix(m).map_err(to_py)?;
        if let Some(d) = dims {
            rho = rho.with_dims(d).map_err(to_py)?;
        }
        Ok(PyState { inner: rho })
    }

    /// Random state of the given rank from a seed.
    #[staticmethod]
    #[pyo3(signature = (dim, rank, seed, dims = None))]
    fn random(dim: usize, rank: usize, seed: u64, dims: Option<(usize, usize)>) -> PyResult<Self> {
        let mut rho = st::sample_state(dim, rank, seed).map_err(to_py)?;
        if let Some(d) = dims {
            rho = rho.with_dims(d).map_err(to_py)?;
        }
        Ok(PyState { inner: rho })
    }

    #[staticmethod]
    fn maximally_mixed(dim: usize) -> Self {
        PyState { inner: DensityMatrix::maximally_mixed(dim) }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyState { inner: parse_state(text).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        to_canonical_json(state_value(&self.inner))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn dims(&self) -> Option<(usize, usize)> {
        self.inner.dims()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        self.inner.matrix().to_rows()
    }

    /// Eigenvalues in descending order.
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    #[pyo3(signature = (threshold = 1e-9))]
    fn rank(&self, threshold: f64) -> usize {
        self.inner.rank(threshold)
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn trace_distance(&self, other: &PyState) -> PyResult<f64> {
        self.inner.trace_distance(&other.inner).map_err(to_py)
    }

    /// `(1 - t) self + t other`.
    fn mix(&self, other: &PyState, t: f64) -> PyResult<Self> {
        let mut rho = self.inner.mix(&other.inner, t).map_err(to_py)?;
        if let Some(d) = self.inner.dims() {
            rho = rho.with_dims(d).map_err(to_py)?;
        }
        Ok(PyState { inner: rho })
    }

    fn __repr__(&self) -> String {
        format!("State(dim={}, rank={})", self.inner.dim(), self.inner.rank(1e-9))
    }
}

/// Finite probability measure on states.
#[pyclass(name = "Ensemble", module = "choquet_roof", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEnsemble {
    inner: st::Ensemble,
}

#[pymethods]
impl PyEnsemble {
    #[new]
    fn new(weights: Vec<f64>, states: Vec<PyState>) -> PyResult<Self> {
        let atoms = states.into_iter().map(|s| s.inner).collect();
        Ok(PyEnsemble { inner: st::Ensemble::new(weights, atoms).map_err(to_py)? })
    }

    #[staticmethod]
    fn random(dim: usize, atoms: usize, seed: u64) -> PyResult<Self> {
        Ok(PyEnsemble { inner: st::sample_ensemble(dim, atoms, seed).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyEnsemble { inner: parse_ensemble(text).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        to_canonical_json(ensemble_value(&self.inner))
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn states(&self) -> Vec<PyState> {
        self.inner.atoms().iter().map(|a| PyState { inner: a.clone() }).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn barycenter(&self) -> PyState {
        PyState { inner: self.inner.barycenter() }
    }

    /// Spectral refinement into pure atoms.
    fn refine(&self) -> Self {
        PyEnsemble { inner: st::refine_to_pure(&self.inner).into_ensemble() }
    }

    fn distance(&self, other: &PyEnsemble) -> PyResult<f64> {
        st::ensemble_distance(&self.inner, &other.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Ensemble(atoms={}, dim={})", self.inner.len(), self.inner.dim())
    }
}

/// Outcome of a roof or hull optimization.
#[pyclass(name = "RoofResult", module = "choquet_roof", frozen, get_all)]
struct PyRoofResult {
    value: f64,
    /// "upper" for roofs, "lower" for hulls.
    bound: &'static str,
    ensemble: PyEnsemble,
    restarts: usize,
    best_per_restart: Vec<f64>,
    converged: bool,
    members: usize,
    mixing: Option<f64>,
}

#[pymethods]
impl PyRoofResult {
    fn __repr__(&self) -> String {
        format!("RoofResult(value={}, bound={:?}, restarts={})", self.value, self.bound, self.restarts)
    }
}

impl From<roof::RoofResult> for PyRoofResult {
    fn from(r: roof::RoofResult) -> Self {
        PyRoofResult {
            value: r.value,
            bound: match r.bound {
                BoundDirection::Upper => "upper",
                BoundDirection::Lower => "lower",
            },
            ensemble: PyEnsemble { inner: r.ensemble },
            restarts: r.restarts,
            best_per_restart: r.best_per_restart,
            converged: r.converged,
            members: r.members,
            mixing: r.mixing,
        }
    }
}

/// Entanglement of formation (upper bound from the roof optimizer).
#[pyfunction]
#[pyo3(signature = (state, restarts = 32, seed = 0, members = None, tol = 1e-9, base = "2"))]
fn eof(py: Python<'_>, state: &PyState, restarts: usize, seed: u64, members: Option<usize>, tol: f64, base: &str) -> PyResult<PyRoofResult> {
    let (opts, base) = (options(restarts, seed, members, tol), parse_base(base)?);
    let rho = state.inner.clone();
    py.detach(|| roof::eof(&rho, &opts, base)).map(Into::into).map_err(to_py)
}

/// Convex roof of the truncated entropy `H_n`, `n >= 2`.
#[pyfunction]
#[pyo3(signature = (state, n, restarts = 32, seed = 0, members = None, tol = 1e-9, base = "2"))]
#[allow(clippy::too_many_arguments)]
fn efn(
    py: Python<'_>,
    state: &PyState,
    n: usize,
    restarts: usize,
    seed: u64,
    members: Option<usize>,
    tol: f64,
    base: &str,
) -> PyResult<PyRoofResult> {
    let (opts, base) = (options(restarts, seed, members, tol), parse_base(base)?);
    let rho = state.inner.clone();
    py.detach(|| roof::efn(&rho, n, &opts, base)).map(Into::into).map_err(to_py)
}

/// Convex roof of a functional named by a selector such as `"entropyA"`,
/// `"hn:3"`, `"kyfan:1"` or `"purity-gap"`.
#[pyfunction]
#[pyo3(signature = (selector, state, restarts = 32, seed = 0, members = None, tol = 1e-9, base = "2"))]
#[allow(clippy::too_many_arguments)]
fn convex_roof(
    py: Python<'_>,
    selector: &str,
    state: &PyState,
    restarts: usize,
    seed: u64,
    members: Option<usize>,
    tol: f64,
    base: &str,
) -> PyResult<PyRoofResult> {
    let opts = options(restarts, seed, members, tol);
    let f = parse_selector(selector, None, &state.inner, parse_base(base)?).map_err(to_py)?;
    let rho = state.inner.clone();
    py.detach(|| roof::convex_roof(f.as_ref(), &rho, &opts)).map(Into::into).map_err(to_py)
}

/// Concave hull over pure atoms mixed toward the state (lower bound).
#[pyfunction]
#[pyo3(signature = (selector, state, mixing = None, restarts = 32, seed = 0, members = None, tol = 1e-9, base = "2"))]
#[allow(clippy::too_many_arguments)]
fn concave_hull(
    py: Python<'_>,
    selector: &str,
    state: &PyState,
    mixing: Option<f64>,
    restarts: usize,
    seed: u64,
    members: Option<usize>,
    tol: f64,
    base: &str,
) -> PyResult<PyRoofResult> {
    let opts = RoofOptions { fixed_mixing: mixing, ..options(restarts, seed, members, tol) };
    let f = parse_selector(selector, None, &state.inner, parse_base(base)?).map_err(to_py)?;
    let rho = state.inner.clone();
    py.detach(|| roof::concave_hull(f.as_ref(), &rho, &opts)).map(Into::into).map_err(to_py)
}

type Plan = Vec<Vec<f64>>;

/// Whether `mu` dominates `nu`: returns `(status, plan, residual)` where
/// status is "dominates", "not-dominates" or "numerically-ambiguous".
#[pyfunction]
fn dominates(mu: &PyEnsemble, nu: &PyEnsemble) -> PyResult<(&'static str, Option<Plan>, f64)> {
    let v = check_dominates(&mu.inner, &nu.inner).map_err(to_py)?;
    let status = match v.status {
        OrderStatus::Dominates => "dominates",
        OrderStatus::NotDominates => "not-dominates",
        OrderStatus::NumericallyAmbiguous => "numerically-ambiguous",
    };
    Ok((status, v.plan.map(|p| p.rows), v.residual))
}

/// Deforms `ensemble` so its barycenter becomes `target`; returns the new
/// ensemble and the mixing coefficient.
#[pyfunction]
fn steer(ensemble: &PyEnsemble, target: &PyState) -> PyResult<(PyEnsemble, f64)> {
    let s = st::steer_barycenter(&ensemble.inner, &target.inner).map_err(to_py)?;
    Ok((PyEnsemble { inner: s.ensemble }, s.epsilon))
}

/// Two-qubit concurrence.
#[pyfunction]
fn concurrence(state: &PyState) -> PyResult<f64> {
    roof_core::oracles::concurrence(&state.inner).map_err(to_py)
}

/// Closed-form two-qubit entanglement of formation.
#[pyfunction]
#[pyo3(signature = (state, base = "2"))]
fn wootters_eof(state: &PyState, base: &str) -> PyResult<f64> {
    roof_core::oracles::wootters_eof(&state.inner, parse_base(base)?).map_err(to_py)
}

/// Runs the command-line interface in process: `(exit code, stdout, stderr)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("choquet-roof".to_string()).chain(args).collect();
    let out = py.detach(|| run_command(argv));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn choquet_roof(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyRoofResult>()?;
    m.add_function(wrap_pyfunction!(eof, m)?)?;
    m.add_function(wrap_pyfunction!(efn, m)?)?;
    m.add_function(wrap_pyfunction!(convex_roof, m)?)?;
    m.add_function(wrap_pyfunction!(concave_hull, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(steer, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(wootters_eof, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
