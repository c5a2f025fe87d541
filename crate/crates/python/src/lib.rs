//! Python bindings: meshes, problems, a single-level solve with indicators,
//! Dörfler marking and the full adaptive loop.

use std::path::PathBuf;

use jumpfem::adapt::{self, ProblemSpec, RefineMode, RunParams};
use jumpfem::mesh::{structured_rectangle, Mesh, SubdomainRule};
use jumpfem::{FemError, Method};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: FemError) -> PyErr {
    match err {
        FemError::Io { .. } => PyIOError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Conforming triangle mesh with subdomain ids.
#[pyclass(name = "Mesh", module = "pyjumpfem", frozen)]
struct PyMesh {
    inner: Mesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, subdomains: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: Mesh::new(vertices, &triangles, &subdomains).map_err(to_py)? })
    }

    /// Structured mesh of the rectangle `lower`–`upper` with a single subdomain.
    #[staticmethod]
    fn rectangle(lower: [f64; 2], upper: [f64; 2], nx: usize, ny: usize) -> PyResult<Self> {
        Ok(Self { inner: structured_rectangle(lower, upper, nx, ny, &SubdomainRule::Single).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: Mesh::from_text(text).map_err(to_py)? })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: Mesh::read(&path).map_err(to_py)? })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn num_elements(&self) -> usize {
        self.inner.num_elements()
    }

    #[getter]
    fn num_faces(&self) -> usize {
        self.inner.num_faces()
    }

    #[getter]
    fn vertices(&self) -> Vec<[f64; 2]> {
        self.inner.vertices().to_vec()
    }

    #[getter]
    fn triangles(&self) -> Vec<[usize; 3]> {
        self.inner.elements().iter().map(|e| e.vertices).collect()
    }

    #[getter]
    fn subdomains(&self) -> Vec<usize> {
        self.inner.elements().iter().map(|e| e.subdomain).collect()
    }

    fn h_max(&self) -> f64 {
        self.inner.h_max()
    }

    /// Newest-vertex bisection of the marked elements plus closure.
    fn refine(&self, marked: Vec<usize>) -> Self {
        Self { inner: self.inner.refine(&marked) }
    }

    fn uniform_refine(&self) -> Self {
        Self { inner: self.inner.uniform_refine() }
    }

    fn __repr__(&self) -> String {
        format!("Mesh(vertices={}, elements={})", self.inner.num_vertices(), self.inner.num_elements())
    }
}

/// A catalog problem: domain, coefficient and data.
#[pyclass(name = "Problem", module = "pyjumpfem", frozen)]
struct PyProblem {
    inner: ProblemSpec,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (name, jump_ratio=None))]
    fn new(name: &str, jump_ratio: Option<f64>) -> PyResult<Self> {
        Ok(Self { inner: ProblemSpec::by_name(name, jump_ratio).map_err(to_py)? })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name
    }

    #[getter]
    fn has_exact_solution(&self) -> bool {
        self.inner.has_exact_solution()
    }

    /// Coefficient value per subdomain id.
    #[getter]
    fn alpha(&self) -> Vec<(usize, f64)> {
        self.inner.alpha.iter().collect()
    }

    fn initial_mesh(&self, n: usize) -> PyResult<PyMesh> {
        Ok(PyMesh { inner: self.inner.initial_mesh(n).map_err(to_py)? })
    }

    /// Exact solution at `x` in subdomain `subdomain`, if known.
    fn exact(&self, subdomain: usize, x: [f64; 2]) -> Option<f64> {
        self.inner.exact().map(|u| u.value(subdomain, x))
    }

    fn __repr__(&self) -> String {
        format!("Problem({:?})", self.inner.name)
    }
}

fn params(method: &str, degree: usize, gamma: Option<f64>, theta: f64, refine: &str, max_dofs: usize) -> PyResult<RunParams> {
    let method: Method = method.parse().map_err(to_py)?;
    let refine: RefineMode = refine.parse().map_err(to_py)?;
    let p = RunParams { method, degree, gamma, theta, refine, max_dofs, ..RunParams::default() };
    p.validate().map_err(to_py)?;
    Ok(p)
}

/// Solves on `mesh` and returns a dict with the solution coefficients,
/// per-element indicators `eta_local` and, when known, the errors.
#[pyfunction]
#[pyo3(signature = (problem, mesh, method="cr", degree=1, gamma=None))]
fn solve<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    mesh: &PyMesh,
    method: &str,
    degree: usize,
    gamma: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = params(method, degree, gamma, 0.5, "uniform", usize::MAX)?;
    let state = adapt::solve_level(&problem.inner, mesh.inner.clone(), &p, 0, None).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("ndof", state.record.ndof)?;
    out.set_item("coefficients", state.solution.coefficients().to_vec())?;
    out.set_item("eta", state.record.eta)?;
    out.set_item("eta_local", state.report.eta_local.clone())?;
    out.set_item("energy_err", state.record.energy_err)?;
    out.set_item("dg_err", state.record.dg_err)?;
    out.set_item("effectivity", state.record.effectivity)?;
    out.set_item("solver_iterations", state.record.solver_iterations)?;
    Ok(out)
}

/// Minimal Dörfler set of element indices for squared indicators.
#[pyfunction]
fn dorfler_mark(eta_squared: Vec<f64>, theta: f64) -> PyResult<Vec<usize>> {
    adapt::dorfler_mark(&eta_squared, theta).map_err(to_py)
}

/// Runs the solve, estimate, mark, refine loop and returns the CSV record.
#[pyfunction]
#[pyo3(signature = (
    problem, method="cr", degree=1, gamma=None, theta=0.5, refine="adaptive",
    max_dofs=100_000, initial_n=4, out_vtk=None
))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    problem: &PyProblem,
    method: &str,
    degree: usize,
    gamma: Option<f64>,
    theta: f64,
    refine: &str,
    max_dofs: usize,
    initial_n: usize,
    out_vtk: Option<PathBuf>,
) -> PyResult<String> {
    let p = params(method, degree, gamma, theta, refine, max_dofs)?;
    let spec = &problem.inner;
    py.detach(|| {
        let mesh = spec.initial_mesh(initial_n)?;
        let run = adapt::run_adaptive(spec, mesh, &p)?;
        if let Some(path) = out_vtk {
            let last = &run.last;
            adapt::emit_vtk(&last.mesh, &last.solution, &last.report, &last.coeff, &path)?;
        }
        Ok(adapt::csv_string(&run.record))
    })
    .map_err(to_py)
}

#[pymodule]
fn pyjumpfem(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(dorfler_mark, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("CSV_HEADER", adapt::CSV_HEADER)?;
    m.add("PROBLEMS", adapt::catalog::PROBLEM_NAMES.to_vec())?;
    Ok(())
}
