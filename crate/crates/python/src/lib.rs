//! Python bindings. Structured results cross the boundary as JSON strings with
//! the same layout the command-line tool prints.

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use sbmm::format::to_json;
use sbmm::{BoundOptions, BoundVariant, CompoundPoissonParams, Error, ExperimentConfig, ObservedMultigraph};

create_exception!(sbmm_py, HypothesisError, PyValueError, "A theorem precondition does not hold.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Hypothesis(_) => HypothesisError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Plain Rust entry points behind the Python wrappers.
pub mod api {
    use super::*;

    pub fn pattern(text: &str) -> sbmm::Result<sbmm::PatternGraph> {
        sbmm::PatternGraph::parse(text)
    }

    pub fn profile_json(pattern: &sbmm::PatternGraph) -> sbmm::Result<String> {
        to_json(&pattern.balancedness_profile()?)
    }

    pub fn count(edge_list: &str, pattern: &sbmm::PatternGraph) -> sbmm::Result<BigUint> {
        sbmm::count_copies(&ObservedMultigraph::parse_edge_list(edge_list)?, pattern)
    }

    pub fn lambda_json(spec: &sbmm::SbmmSpec, pattern: &sbmm::PatternGraph, eps: f64) -> sbmm::Result<String> {
        to_json(&sbmm::lambda_params(spec, pattern, eps)?)
    }

    pub fn bound_json(
        spec: &sbmm::SbmmSpec,
        pattern: &sbmm::PatternGraph,
        variant: &str,
        c_override: Option<f64>,
    ) -> sbmm::Result<String> {
        let variant: BoundVariant = variant.parse()?;
        let opts = BoundOptions { c_override, ..Default::default() };
        to_json(&sbmm::tv_bound(spec, pattern, variant, &opts)?)
    }

    pub fn experiment_json(config: &str) -> sbmm::Result<String> {
        let cfg: ExperimentConfig = serde_json::from_str(config)?;
        to_json(&sbmm::run_experiment(&cfg)?)
    }

    pub fn cp_pmf(lambda: Vec<f64>, kmax: usize) -> sbmm::Result<Vec<f64>> {
        Ok(sbmm::cp_pmf(&CompoundPoissonParams::from_lambda(lambda)?, kmax))
    }
}

/// A pattern multigraph, built from a shortcut (`"cycle:4"`) or JSON object text.
#[pyclass(name = "Pattern", frozen)]
struct Pattern {
    inner: sbmm::PatternGraph,
}

#[pymethods]
impl Pattern {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Pattern { inner: api::pattern(text).map_err(to_py)? })
    }

    #[getter]
    fn vertices(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edges(&self) -> u32 {
        self.inner.edge_count()
    }

    #[getter]
    fn rho(&self) -> u64 {
        self.inner.rho()
    }

    /// Balancedness profile as JSON; rationals are strings such as `"3/2"`.
    fn profile(&self) -> PyResult<String> {
        api::profile_json(&self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Pattern(vertices={}, edges={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

/// A model specification, built from its JSON text.
#[pyclass(name = "Model", frozen)]
struct Model {
    inner: sbmm::SbmmSpec,
}

#[pymethods]
impl Model {
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        Ok(Model { inner: sbmm::SbmmSpec::from_json(json).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    /// One sampled multigraph as edge-list text.
    fn sample(&self, seed: u64) -> String {
        self.inner.sample(seed).to_edge_list()
    }

    fn expected_count(&self, pattern: &Pattern) -> PyResult<f64> {
        sbmm::expected_count(&self.inner, &pattern.inner).map_err(to_py)
    }

    #[pyo3(signature = (pattern, eps = sbmm::cp::DEFAULT_EPS))]
    fn lambda_params(&self, pattern: &Pattern, eps: f64) -> PyResult<String> {
        api::lambda_json(&self.inner, &pattern.inner, eps).map_err(to_py)
    }

    #[pyo3(signature = (pattern, variant, c_override = None))]
    fn bound(&self, pattern: &Pattern, variant: &str, c_override: Option<f64>) -> PyResult<String> {
        api::bound_json(&self.inner, &pattern.inner, variant, c_override).map_err(to_py)
    }
}

/// Copies of `pattern` in a graph given as edge-list text.
#[pyfunction]
fn count_copies(edge_list: &str, pattern: &Pattern) -> PyResult<BigUint> {
    api::count(edge_list, &pattern.inner).map_err(to_py)
}

/// Report JSON for an experiment config given as JSON text.
#[pyfunction]
fn run_experiment(config: &str) -> PyResult<String> {
    api::experiment_json(config).map_err(to_py)
}

/// `P(0..=kmax)` of the compound Poisson law with parameters `lambda_1, lambda_2, ...`.
#[pyfunction]
fn cp_pmf(lambda: Vec<f64>, kmax: usize) -> PyResult<Vec<f64>> {
    api::cp_pmf(lambda, kmax).map_err(to_py)
}

#[pymodule]
fn sbmm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pattern>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(count_copies, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(cp_pmf, m)?)?;
    m.add("HypothesisError", m.py().get_type::<HypothesisError>())?;
    m.add("BOUND_VARIANTS", BoundVariant::ALL.iter().map(|v| v.name()).collect::<Vec<_>>())?;
    Ok(())
}
