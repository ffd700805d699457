//! Python bindings: fields, scalars, word systems, varieties, free
//! representations and the report-producing commands.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use repgeo::config::{RunConfig, TargetConfig};
use repgeo::field::{FieldAutomorphism, FieldDescriptor};
use repgeo::freelie::{witt_number, LyndonBasis};
use repgeo::report;
use repgeo::term::parse_scalar;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn run_err(e: report::ReportError) -> PyErr {
    match e {
        report::ReportError::Config(_) | report::ReportError::Json(_) | report::ReportError::Schema(_) => value_err(e),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Field", frozen)]
struct PyField(FieldDescriptor);

#[pymethods]
impl PyField {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyField(spec.parse().map_err(value_err)?))
    }

    fn automorphisms(&self) -> Vec<String> {
        self.0.automorphism_group().iter().map(|a| a.to_string()).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Field('{}')", self.0)
    }
}

#[pyclass(name = "Scalar", frozen)]
struct PyScalar(repgeo::field::Scalar);

#[pymethods]
impl PyScalar {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        Ok(PyScalar(parse_scalar(src).map_err(value_err)?))
    }

    fn conj(&self) -> Self {
        PyScalar(self.0.conj())
    }

    fn inv(&self) -> PyResult<Self> {
        Ok(PyScalar(self.0.checked_inv().map_err(value_err)?))
    }

    fn __add__(&self, other: &PyScalar) -> PyResult<Self> {
        Ok(PyScalar(self.0.checked_add(&other.0).map_err(value_err)?))
    }

    fn __sub__(&self, other: &PyScalar) -> PyResult<Self> {
        Ok(PyScalar(self.0.checked_sub(&other.0).map_err(value_err)?))
    }

    fn __mul__(&self, other: &PyScalar) -> PyResult<Self> {
        Ok(PyScalar(self.0.checked_mul(&other.0).map_err(value_err)?))
    }

    fn __eq__(&self, other: &PyScalar) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scalar('{}')", self.0)
    }
}

/// `W = (a, phi)`.
#[pyclass(name = "WordSystem", frozen)]
struct PyWordSystem(repgeo::verbal::WordSystem);

#[pymethods]
impl PyWordSystem {
    #[new]
    #[pyo3(signature = (a, phi = "id"))]
    fn new(a: &str, phi: &str) -> PyResult<Self> {
        let a = parse_scalar(a).map_err(value_err)?;
        let phi: FieldAutomorphism = phi.parse().map_err(value_err)?;
        Ok(PyWordSystem(repgeo::verbal::WordSystem::new(a, phi).map_err(value_err)?))
    }

    #[getter]
    fn a(&self) -> PyScalar {
        PyScalar(self.0.a.clone())
    }

    #[getter]
    fn phi(&self) -> String {
        self.0.phi.to_string()
    }

    fn inverse(&self) -> Self {
        PyWordSystem(self.0.inverse())
    }

    /// Applying `self` and then `outer`.
    fn then(&self, outer: &PyWordSystem) -> Self {
        PyWordSystem(repgeo::verbal::WordSystem::stack(&self.0, &outer.0))
    }

    fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// A variety together with run settings (seed, draws, degree bound).
#[pyclass(name = "Variety")]
struct PyVariety(RunConfig);

#[pymethods]
impl PyVariety {
    /// Identities are polynomials `f` meaning `f * v = 0`; the default is
    /// the multilinear identity `x1*x2*x3*x4*x5*x6`.
    #[new]
    #[pyo3(signature = (field = "Q", identities = None, cap = 6))]
    fn new(field: &str, identities: Option<Vec<String>>, cap: usize) -> PyResult<Self> {
        let mut cfg = RunConfig::degree_six(field.parse().map_err(value_err)?);
        if let Some(ids) = identities {
            cfg.identities = ids;
            cfg.cap = cap;
        }
        cfg.variety().map_err(value_err)?;
        Ok(PyVariety(cfg))
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let cfg = RunConfig::from_toml(text).map_err(value_err)?;
        cfg.variety().map_err(value_err)?;
        Ok(PyVariety(cfg))
    }

    fn to_toml(&self) -> String {
        self.0.to_toml()
    }

    #[getter]
    fn field(&self) -> PyField {
        PyField(self.0.field)
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.0.seed = seed;
    }

    #[setter]
    fn set_degree_bound(&mut self, bound: Option<usize>) {
        self.0.degree_bound = bound;
    }

    /// The free representation `F(n1, n2)`.
    #[pyo3(signature = (n1 = 2, n2 = 1))]
    fn free(&self, n1: usize, n2: usize) -> PyResult<PyRepresentation> {
        let mut cfg = self.0.clone();
        cfg.n1 = n1;
        cfg.n2 = n2;
        Ok(PyRepresentation {
            rep: cfg.free().map_err(value_err)?,
            cfg,
        })
    }

    /// Order of the group of automorphisms modulo inner ones.
    fn group_order(&self) -> PyResult<usize> {
        let v = self.0.variety().map_err(value_err)?;
        let g = repgeo::verbal::quotient_group_description(&v, self.0.seed).map_err(value_err)?;
        Ok(g.order)
    }

    fn group(&self) -> PyResult<PyReport> {
        Ok(PyReport(report::group(&self.0).map_err(run_err)?))
    }

    fn is_inner(&self, w: &PyWordSystem) -> PyResult<bool> {
        let v = self.0.variety().map_err(value_err)?;
        Ok(repgeo::verbal::is_inner(&w.0, &v, self.0.seed).map_err(value_err)?.is_inner())
    }

    fn inner(&self, w: &PyWordSystem) -> PyResult<PyReport> {
        Ok(PyReport(report::inner(&self.0, &w.0).map_err(run_err)?))
    }

    /// Closure of `system` (one equation per line) in `F(n1, n2)` w.r.t.
    /// the target described by `target_toml`.
    #[pyo3(signature = (system, target_toml, n1 = 2, n2 = 1))]
    fn closure(&self, system: &str, target_toml: &str, n1: usize, n2: usize) -> PyResult<PyReport> {
        let mut cfg = self.0.clone();
        cfg.n1 = n1;
        cfg.n2 = n2;
        let target = TargetConfig::from_toml(target_toml).map_err(value_err)?;
        Ok(PyReport(report::closure_report(&cfg, system, &target).map_err(run_err)?))
    }

    fn __repr__(&self) -> String {
        format!("Variety(field='{}', identities={:?}, cap={})", self.0.field, self.0.identities, self.0.cap)
    }
}

#[pyclass(name = "Representation", frozen)]
struct PyRepresentation {
    rep: Arc<repgeo::representation::Representation>,
    cfg: RunConfig,
}

#[pymethods]
impl PyRepresentation {
    #[getter]
    fn n1(&self) -> usize {
        self.rep.n1()
    }

    #[getter]
    fn n2(&self) -> usize {
        self.rep.n2()
    }

    #[getter]
    fn module_dim(&self) -> usize {
        self.rep.module_dim()
    }

    fn module_dims(&self) -> Vec<usize> {
        (0..=self.rep.cap()).map(|n| self.rep.module_dim_degree(n)).collect()
    }

    fn lie_dims(&self) -> Vec<usize> {
        self.rep.lie_dims()
    }

    fn ibn_invariants(&self) -> PyResult<(usize, usize)> {
        self.rep.ibn_invariants().map_err(value_err)
    }

    fn basis(&self) -> PyResult<PyReport> {
        Ok(PyReport(report::basis(&self.cfg).map_err(run_err)?))
    }

    /// Runs the `s_F : F -> F*_W` battery.
    fn twist(&self, w: &PyWordSystem) -> PyResult<PyReport> {
        Ok(PyReport(report::twist(&self.cfg, &w.0).map_err(run_err)?))
    }

    fn __repr__(&self) -> String {
        format!("Representation({})", self.rep.name())
    }
}

#[pyclass(name = "Report", frozen)]
struct PyReport(report::Report);

#[pymethods]
impl PyReport {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyReport(report::Report::from_json(text).map_err(run_err)?))
    }

    #[getter]
    fn command(&self) -> String {
        self.0.command.clone()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.0.passed
    }

    #[getter]
    fn narrative(&self) -> String {
        self.0.narrative.clone()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// The accompanying certificate document, if the command emits one.
    fn certificate_json(&self) -> Option<String> {
        self.0.certificate().map(|c| c.to_json())
    }

    /// Re-validates the report; raises on failure.
    fn verify(&self) -> PyResult<()> {
        self.0.verify().map_err(run_err)
    }

    fn __str__(&self) -> String {
        self.0.narrative.clone()
    }
}

#[pyfunction]
fn lyndon_counts(alphabet: usize, cap: usize) -> Vec<usize> {
    LyndonBasis::new(alphabet, cap).counts()
}

#[pyfunction(name = "witt_number")]
fn py_witt_number(r: usize, n: usize) -> usize {
    witt_number(r, n)
}

/// The separation example over `Q(sqrt d)`.
#[pyfunction]
#[pyo3(signature = (d = 2, lam = "sqrt(2)", seed = repgeo::geometry::DEFAULT_SEED, draws = repgeo::geometry::DEFAULT_DRAWS, degree_bound = None))]
fn separation_example(
    py: Python<'_>,
    d: i64,
    lam: &str,
    seed: u64,
    draws: usize,
    degree_bound: Option<usize>,
) -> PyResult<PyReport> {
    let lambda = parse_scalar(lam).map_err(value_err)?;
    let r = py.detach(|| report::separate(d, lambda, seed, draws, degree_bound));
    Ok(PyReport(r.map_err(run_err)?))
}

/// Re-validates a report or certificate document; returns what was checked.
#[pyfunction]
fn verify(text: &str) -> PyResult<String> {
    report::verify_document(text).map_err(run_err)
}

#[pymodule]
fn repgeo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyScalar>()?;
    m.add_class::<PyWordSystem>()?;
    m.add_class::<PyVariety>()?;
    m.add_class::<PyRepresentation>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(lyndon_counts, m)?)?;
    m.add_function(wrap_pyfunction!(py_witt_number, m)?)?;
    m.add_function(wrap_pyfunction!(separation_example, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
