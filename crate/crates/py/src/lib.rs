//! Python bindings (`import linfb`).

use std::collections::BTreeMap;

use linfb_core::duality;
use linfb_core::mimo::{self, DesignForm, Direction};
use linfb_core::simkit::{self, RngSpec};
use linfb_core::siso::{self, PhiVariant, SimoBeta};
use linfb_core::{blockmat, DenseMatrix, LinfbError};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: LinfbError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: &[Vec<f64>]) -> PyResult<DenseMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("expected a non-empty rectangular list of rows"));
    }
    Ok(DenseMatrix::from_row_slice(rows.len(), cols, &rows.concat()))
}

fn from_matrix(m: &DenseMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[pyclass(name = "ChannelSpec", frozen, from_py_object)]
#[derive(Clone)]
struct PyChannelSpec {
    inner: mimo::ChannelSpec,
}

#[pymethods]
impl PyChannelSpec {
    /// `h1`, `h2` are lists of rows (receive × transmit antennas).
    #[new]
    #[pyo3(signature = (h1, h2, power, direction = "mac"))]
    fn new(h1: Vec<Vec<f64>>, h2: Vec<Vec<f64>>, power: f64, direction: &str) -> PyResult<Self> {
        let direction = match direction {
            "mac" => Direction::Mac,
            "bc" => Direction::Bc,
            d => return Err(PyValueError::new_err(format!("direction must be 'mac' or 'bc', got {d:?}"))),
        };
        let inner = mimo::ChannelSpec::new(to_matrix(&h1)?, to_matrix(&h2)?, power, direction).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (h1, h2, power, direction = "mac"))]
    fn siso(h1: f64, h2: f64, power: f64, direction: &str) -> PyResult<Self> {
        Self::new(vec![vec![h1]], vec![vec![h2]], power, direction)
    }

    #[getter]
    fn h1(&self) -> Vec<Vec<f64>> {
        from_matrix(&self.inner.h1)
    }

    #[getter]
    fn h2(&self) -> Vec<Vec<f64>> {
        from_matrix(&self.inner.h2)
    }

    #[getter]
    fn power(&self) -> f64 {
        self.inner.power
    }

    #[getter]
    fn direction(&self) -> &'static str {
        self.inner.direction.name()
    }

    fn digest(&self) -> String {
        self.inner.digest()
    }

    fn __repr__(&self) -> String {
        format!("ChannelSpec(direction={:?}, power={}, digest={})", self.direction(), self.power(), self.digest())
    }
}

#[pyclass(name = "FeedbackDesign", frozen, from_py_object)]
#[derive(Clone)]
struct PyFeedbackDesign {
    inner: mimo::FeedbackDesign,
}

fn parse_form(form: &str) -> PyResult<DesignForm> {
    DesignForm::parse(form).ok_or_else(|| PyValueError::new_err(format!("form must be one of A, B, C, D; got {form:?}")))
}

#[pymethods]
impl PyFeedbackDesign {
    #[staticmethod]
    fn zeros(form: &str, eta: usize, spec: &PyChannelSpec) -> PyResult<Self> {
        Ok(Self { inner: mimo::FeedbackDesign::zeros(parse_form(form)?, eta, &spec.inner).map_err(err)? })
    }

    /// Standard normal entries scaled to consume `fraction · ηP`.
    #[staticmethod]
    fn random(spec: &PyChannelSpec, eta: usize, form: &str, fraction: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: mimo::random_design(&spec.inner, eta, parse_form(form)?, fraction, seed).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str, spec: &PyChannelSpec) -> PyResult<Self> {
        Ok(Self { inner: mimo::FeedbackDesign::from_json(text, &spec.inner).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn eta(&self) -> usize {
        self.inner.eta
    }

    #[getter]
    fn form(&self) -> &'static str {
        self.inner.form.name()
    }

    fn consumed_power(&self) -> f64 {
        self.inner.consumed_power()
    }

    fn to_noise_form(&self, spec: &PyChannelSpec) -> PyResult<Self> {
        Ok(Self { inner: self.inner.to_noise_form(&spec.inner).map_err(err)? })
    }

    fn with_second_zeroed(&self) -> Self {
        Self { inner: self.inner.with_second_zeroed() }
    }

    /// Dense first and second feedback matrices.
    fn matrices(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        (from_matrix(&self.inner.first.to_dense()), from_matrix(&self.inner.second.to_dense()))
    }

    fn __repr__(&self) -> String {
        format!("FeedbackDesign(form={}, eta={})", self.form(), self.eta())
    }
}

#[pyclass(name = "RegionFrontier", frozen, from_py_object)]
#[derive(Clone)]
struct PyRegionFrontier {
    inner: linfb_core::RegionFrontier,
}

#[pymethods]
impl PyRegionFrontier {
    #[getter]
    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.points.clone()
    }

    #[getter]
    fn meta(&self) -> BTreeMap<String, String> {
        self.inner.meta.clone()
    }

    fn max_sum_rate(&self) -> f64 {
        self.inner.max_sum_rate()
    }

    fn max_sum_point(&self) -> Option<(f64, f64)> {
        self.inner.max_sum_point()
    }

    /// Vertical distance from `point` up to the region boundary (negative if outside).
    fn slack(&self, point: (f64, f64)) -> f64 {
        self.inner.slack(point)
    }

    fn min_slack_over(&self, other: &PyRegionFrontier) -> f64 {
        self.inner.min_slack_over(&other.inner)
    }

    fn hausdorff(&self, other: &PyRegionFrontier) -> f64 {
        self.inner.hausdorff(&other.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("RegionFrontier({} points, max sum {:.6})", self.inner.len(), self.inner.max_sum_rate())
    }
}

fn frontier(inner: linfb_core::RegionFrontier) -> PyRegionFrontier {
    PyRegionFrontier { inner }
}

fn to_dict<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyDict>> {
    let json = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    if let serde_json::Value::Object(map) = json {
        for (k, v) in map {
            match v {
                serde_json::Value::Number(n) if n.is_u64() => d.set_item(k, n.as_u64())?,
                serde_json::Value::Number(n) => d.set_item(k, n.as_f64())?,
                serde_json::Value::Bool(b) => d.set_item(k, b)?,
                serde_json::Value::String(s) => d.set_item(k, s)?,
                other => d.set_item(k, other.to_string())?,
            }
        }
    }
    Ok(d)
}

#[pyfunction]
fn rho_star(h1: f64, h2: f64, p1: f64, p2: f64) -> f64 {
    siso::rho_star(h1, h2, p1, p2)
}

#[pyfunction]
fn rho_residual(h1: f64, h2: f64, p1: f64, p2: f64, rho: f64) -> f64 {
    siso::rho_residual(h1, h2, p1, p2, rho)
}

#[pyfunction]
fn mac_siso_sum_capacity(h1: f64, h2: f64, power: f64) -> PyResult<f64> {
    siso::mac_siso_sum_capacity(h1, h2, power).map_err(err)
}

#[pyfunction]
fn symmetric_sum_capacity(h: f64, power: f64) -> PyResult<f64> {
    siso::symmetric_sum_capacity(h, power).map_err(err)
}

#[pyfunction]
fn zeta(alpha: f64, h: f64, power: f64) -> PyResult<f64> {
    siso::zeta(alpha, h, power).map_err(err)
}

fn parse_variant(variant: &str) -> PyResult<PhiVariant> {
    PhiVariant::parse(variant).ok_or_else(|| PyValueError::new_err(format!("variant must be 'printed' or 'exponent-K', got {variant:?}")))
}

#[pyfunction]
#[pyo3(signature = (k, power, variant = "exponent-K"))]
fn phi_k(k: usize, power: f64, variant: &str) -> PyResult<f64> {
    siso::phi_k(k, power, parse_variant(variant)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, power, variant = "exponent-K"))]
fn k_user_symmetric_sum_capacity(k: usize, power: f64, variant: &str) -> PyResult<f64> {
    siso::k_user_symmetric_sum_capacity(k, power, parse_variant(variant)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h1, h2, power, alpha_grid = 101, rho_grid = 101))]
fn mac_siso_region(h1: f64, h2: f64, power: f64, alpha_grid: usize, rho_grid: usize) -> PyResult<PyRegionFrontier> {
    siso::mac_siso_region(h1, h2, power, alpha_grid, rho_grid).map(frontier).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h1, h2, power, alpha_grid = 101))]
fn mac_siso_nofb_region(h1: f64, h2: f64, power: f64, alpha_grid: usize) -> PyResult<PyRegionFrontier> {
    siso::mac_siso_nofb_region(h1, h2, power, alpha_grid).map(frontier).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h1, h2, power, grid = 101))]
fn nofb_bc_siso_region(h1: f64, h2: f64, power: f64, grid: usize) -> PyResult<PyRegionFrontier> {
    siso::nofb_bc_siso_region(h1, h2, power, grid).map(frontier).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h1, h2, power, alpha_grid = 101, rho_grid = 101))]
fn miso_mac_region(h1: Vec<f64>, h2: Vec<f64>, power: f64, alpha_grid: usize, rho_grid: usize) -> PyResult<PyRegionFrontier> {
    siso::miso_mac_region(&h1, &h2, power, alpha_grid, rho_grid).map(frontier).map_err(err)
}

/// `beta_grid = 0` uses the channel cosine for the correlation term.
#[pyfunction]
#[pyo3(signature = (h1, h2, power, alpha_grid = 101, rho_grid = 101, beta_grid = 0))]
fn simo_mac_region(
    h1: Vec<f64>,
    h2: Vec<f64>,
    power: f64,
    alpha_grid: usize,
    rho_grid: usize,
    beta_grid: usize,
) -> PyResult<PyRegionFrontier> {
    let beta = if beta_grid == 0 { SimoBeta::FromChannel } else { SimoBeta::Union(beta_grid) };
    siso::simo_mac_region(&h1, &h2, power, alpha_grid, rho_grid, beta).map(frontier).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (spec, design, rate_grid = 65))]
fn multiletter_inner_bound(spec: &PyChannelSpec, design: &PyFeedbackDesign, rate_grid: usize) -> PyResult<PyRegionFrontier> {
    mimo::multiletter_inner_bound(&spec.inner, &design.inner, rate_grid).map(frontier).map_err(err)
}

/// Returns `(best_design, best_sum_rate, frontier)`.
#[pyfunction]
fn search_feedback_design(
    spec: &PyChannelSpec,
    eta: usize,
    trials: usize,
    seed: u64,
) -> PyResult<(PyFeedbackDesign, f64, PyRegionFrontier)> {
    let r = mimo::search_feedback_design(&spec.inner, eta, trials, seed).map_err(err)?;
    Ok((PyFeedbackDesign { inner: r.best }, r.best_sum_rate, frontier(r.frontier)))
}

#[pyfunction]
fn mac_design_to_bc(design: &PyFeedbackDesign) -> PyResult<PyFeedbackDesign> {
    Ok(PyFeedbackDesign { inner: mimo::mac_design_to_bc(&design.inner).map_err(err)? })
}

#[pyfunction]
fn verify_duality_identities<'py>(py: Python<'py>, design: &PyFeedbackDesign, spec: &PyChannelSpec) -> PyResult<Bound<'py, PyDict>> {
    let r = duality::verify_duality_identities(&design.inner, &spec.inner).map_err(err)?;
    let d = to_dict(py, &r)?;
    d.set_item("passed", r.passed())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (design, spec, trials = 100_000, seed = 0))]
fn verify_power_lemma<'py>(
    py: Python<'py>,
    design: &PyFeedbackDesign,
    spec: &PyChannelSpec,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = simkit::verify_power_lemma(&design.inner, &spec.inner, trials, &RngSpec::new(seed, "power"), None).map_err(err)?;
    to_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (design, spec, samples = 1000, seed = 0))]
fn verify_recursions(design: &PyFeedbackDesign, spec: &PyChannelSpec, samples: usize, seed: u64) -> PyResult<f64> {
    simkit::verify_recursions(&design.inner, &spec.inner, samples, &RngSpec::new(seed, "recursion"))
        .map(|r| r.max_error)
        .map_err(err)
}

/// Reverse image `E·Aᵀ·E`.
#[pyfunction]
fn reverse(a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    Ok(from_matrix(&blockmat::reverse(&to_matrix(&a)?)))
}

#[pymodule]
fn linfb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannelSpec>()?;
    m.add_class::<PyFeedbackDesign>()?;
    m.add_class::<PyRegionFrontier>()?;
    m.add_function(wrap_pyfunction!(rho_star, m)?)?;
    m.add_function(wrap_pyfunction!(rho_residual, m)?)?;
    m.add_function(wrap_pyfunction!(mac_siso_sum_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(symmetric_sum_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(phi_k, m)?)?;
    m.add_function(wrap_pyfunction!(k_user_symmetric_sum_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(mac_siso_region, m)?)?;
    m.add_function(wrap_pyfunction!(mac_siso_nofb_region, m)?)?;
    m.add_function(wrap_pyfunction!(nofb_bc_siso_region, m)?)?;
    m.add_function(wrap_pyfunction!(miso_mac_region, m)?)?;
    m.add_function(wrap_pyfunction!(simo_mac_region, m)?)?;
    m.add_function(wrap_pyfunction!(multiletter_inner_bound, m)?)?;
    m.add_function(wrap_pyfunction!(search_feedback_design, m)?)?;
    m.add_function(wrap_pyfunction!(mac_design_to_bc, m)?)?;
    m.add_function(wrap_pyfunction!(verify_duality_identities, m)?)?;
    m.add_function(wrap_pyfunction!(verify_power_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(verify_recursions, m)?)?;
    m.add_function(wrap_pyfunction!(reverse, m)?)?;
    Ok(())
}
