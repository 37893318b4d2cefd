//! Python bindings for `gaussmech`, importable as `gaussmech`.
//!
//! Domain errors are raised as `gaussmech.GaussmechError`, a subclass of
//! `ValueError`.

use gaussmech as core;
use gaussmech::specfun;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(gaussmech, GaussmechError, PyValueError);

type SurfaceRow = (Option<f64>, f64, f64, bool);

fn py_err(e: core::Error) -> PyErr {
    GaussmechError::new_err(e.to_string())
}

fn privacy(epsilon: f64, delta: f64) -> PyResult<core::PrivacyParams> {
    core::PrivacyParams::new(epsilon, delta).map_err(py_err)
}

fn sensitivity(value: f64) -> PyResult<core::Sensitivity> {
    core::Sensitivity::new(value).map_err(py_err)
}

fn parse_method(name: &str) -> PyResult<core::Method> {
    name.parse().map_err(|e: core::Error| py_err(e))
}

#[pyclass(name = "CalibrationResult", module = "gaussmech", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyCalibrationResult {
    sigma: f64,
    method: String,
    z_value: Option<f64>,
    domain_warning: Option<String>,
}

#[pymethods]
impl PyCalibrationResult {
    fn __repr__(&self) -> String {
        format!("CalibrationResult(method='{}', sigma={})", self.method, self.sigma)
    }
}

impl From<core::CalibrationResult> for PyCalibrationResult {
    fn from(r: core::CalibrationResult) -> Self {
        Self {
            sigma: r.sigma,
            method: r.method.as_str().to_owned(),
            z_value: r.z_value,
            domain_warning: r.domain_warning,
        }
    }
}

#[pyclass(name = "NoiseOutput", module = "gaussmech", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyNoiseOutput {
    noisy_values: Vec<f64>,
    sigma_used: f64,
    method: Option<String>,
    seed_used: u64,
    domain_warning: Option<String>,
}

#[pymethods]
impl PyNoiseOutput {
    fn __repr__(&self) -> String {
        format!(
            "NoiseOutput(n={}, sigma_used={}, seed_used={})",
            self.noisy_values.len(),
            self.sigma_used,
            self.seed_used
        )
    }
}

impl From<core::NoiseOutput> for PyNoiseOutput {
    fn from(o: core::NoiseOutput) -> Self {
        Self {
            noisy_values: o.noisy_values,
            sigma_used: o.sigma_used,
            method: o.method.map(|m| m.as_str().to_owned()),
            seed_used: o.seed_used,
            domain_warning: o.domain_warning,
        }
    }
}

#[pyfunction]
fn erf(x: f64) -> PyResult<f64> {
    specfun::erf(x).map_err(py_err)
}

#[pyfunction]
fn erfc(x: f64) -> PyResult<f64> {
    specfun::erfc(x).map_err(py_err)
}

#[pyfunction]
fn std_normal_cdf(x: f64) -> PyResult<f64> {
    specfun::std_normal_cdf(x).map(|p| p.value()).map_err(py_err)
}

#[pyfunction]
fn log_std_normal_cdf(x: f64) -> PyResult<f64> {
    specfun::log_std_normal_cdf(x).map_err(py_err)
}

#[pyfunction]
fn std_normal_quantile(p: f64) -> PyResult<f64> {
    specfun::std_normal_quantile(p).map_err(py_err)
}

#[pyfunction]
fn quantile_upper_bound(p: f64) -> PyResult<f64> {
    specfun::quantile_upper_bound(p).map_err(py_err)
}

/// Calibrates σ. `method` is one of standard, closed-form, simplified,
/// optimal, analytic.
#[pyfunction]
#[pyo3(signature = (epsilon, delta, sensitivity = 1.0, method = "closed-form"))]
fn calibrate(epsilon: f64, delta: f64, sensitivity: f64, method: &str) -> PyResult<PyCalibrationResult> {
    let m = parse_method(method)?;
    core::calibrate(m, &privacy(epsilon, delta)?, self::sensitivity(sensitivity)?)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (epsilon, delta, sensitivity = 1.0))]
fn sigma_floor(epsilon: f64, delta: f64, sensitivity: f64) -> PyResult<f64> {
    Ok(core::sigma_floor(&privacy(epsilon, delta)?, self::sensitivity(sensitivity)?))
}

/// Returns `(epsilon, out_of_range)`.
#[pyfunction]
#[pyo3(signature = (delta, sigma, sensitivity = 1.0))]
fn epsilon_from_sigma_standard(delta: f64, sigma: f64, sensitivity: f64) -> PyResult<(f64, bool)> {
    let r = core::epsilon_from_sigma_standard(delta, sigma, self::sensitivity(sensitivity)?).map_err(py_err)?;
    Ok((r.epsilon, r.out_of_range))
}

#[pyfunction]
#[pyo3(signature = (sigma, epsilon, delta, sensitivity = 1.0))]
fn balle_lhs(sigma: f64, epsilon: f64, delta: f64, sensitivity: f64) -> PyResult<f64> {
    core::balle_lhs(sigma, &privacy(epsilon, delta)?, self::sensitivity(sensitivity)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (sigma, epsilon, delta, sensitivity = 1.0))]
fn suffcrit_probability(sigma: f64, epsilon: f64, delta: f64, sensitivity: f64) -> PyResult<f64> {
    core::suffcrit_probability(sigma, &privacy(epsilon, delta)?, self::sensitivity(sensitivity)?)
        .map(|p| p.value())
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (epsilon, delta, sensitivity = 1.0, rel_tol = 1e-12, max_iter = 200))]
fn solve_sufficient_sigma(
    epsilon: f64,
    delta: f64,
    sensitivity: f64,
    rel_tol: f64,
    max_iter: usize,
) -> PyResult<f64> {
    let cfg = core::RootSolveConfig { rel_tol, max_iter, ..Default::default() };
    core::solve_sufficient_sigma(&privacy(epsilon, delta)?, self::sensitivity(sensitivity)?, &cfg).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (epsilon, delta, sensitivity = 1.0, rel_tol = 1e-12, max_iter = 200))]
fn solve_analytic_sigma(
    epsilon: f64,
    delta: f64,
    sensitivity: f64,
    rel_tol: f64,
    max_iter: usize,
) -> PyResult<PyCalibrationResult> {
    let cfg = core::RootSolveConfig { rel_tol, max_iter, ..Default::default() };
    core::solve_analytic_sigma(&privacy(epsilon, delta)?, self::sensitivity(sensitivity)?, &cfg)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
fn g_value(epsilon: f64, delta: f64) -> PyResult<f64> {
    core::g_value(&privacy(epsilon, delta)?).map_err(py_err)
}

#[pyfunction]
fn d_value(epsilon: f64, delta: f64) -> PyResult<f64> {
    core::d_value(&privacy(epsilon, delta)?).map_err(py_err)
}

#[pyfunction]
fn ratio_r(epsilon: f64, delta: f64) -> PyResult<f64> {
    core::ratio_r(epsilon, delta).map_err(py_err)
}

#[pyfunction]
fn ratio_r_deps(epsilon: f64, delta: f64) -> PyResult<f64> {
    core::ratio_r_deps(epsilon, delta).map_err(py_err)
}

#[pyfunction]
fn crossover_epsilon(delta: f64) -> PyResult<f64> {
    core::crossover_epsilon(delta).map_err(py_err)
}

#[pyfunction]
fn rho_value(delta: f64) -> PyResult<f64> {
    core::rho_value(delta).map_err(py_err)
}

/// Evaluates an analysis surface on a grid and returns
/// `(epsilon, delta, value, violated)` tuples; `epsilon` is `None` for the
/// one-dimensional surfaces.
#[pyfunction]
#[pyo3(signature = (surface, eps, delta, spacing = "linear"))]
fn evaluate_surface(
    surface: &str,
    eps: (f64, f64, usize),
    delta: (f64, f64, usize),
    spacing: &str,
) -> PyResult<Vec<SurfaceRow>> {
    let kind: core::SurfaceKind = surface.parse().map_err(py_err)?;
    let spacing: core::Spacing = spacing.parse().map_err(py_err)?;
    let eps = core::Axis::new(eps.0, eps.1, eps.2).map_err(py_err)?;
    let delta = core::Axis::new(delta.0, delta.1, delta.2).map_err(py_err)?;
    let grid = core::GridSpec::new(eps, delta, spacing).map_err(py_err)?;
    let points = core::evaluate_surface(kind, &grid).map_err(py_err)?;
    Ok(points.into_iter().map(|p| (p.epsilon, p.delta, p.value, p.violated)).collect())
}

/// Adds `N(0, sigma²)` noise to each value.
#[pyfunction]
#[pyo3(signature = (values, sigma, seed = None))]
fn sample_gaussian_mechanism(values: Vec<f64>, sigma: f64, seed: Option<u64>) -> PyResult<PyNoiseOutput> {
    let req = core::NoiseRequest { values, sigma, seed };
    core::sample_gaussian_mechanism(&req).map(Into::into).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (values, epsilon, delta, sensitivity = 1.0, method = "closed-form", seed = None))]
fn calibrate_and_sample(
    values: Vec<f64>,
    epsilon: f64,
    delta: f64,
    sensitivity: f64,
    method: &str,
    seed: Option<u64>,
) -> PyResult<PyNoiseOutput> {
    let m = parse_method(method)?;
    core::calibrate_and_sample(&privacy(epsilon, delta)?, self::sensitivity(sensitivity)?, m, &values, seed)
        .map(Into::into)
        .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "gaussmech")]
fn gaussmech_python(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GaussmechError", m.py().get_type::<GaussmechError>())?;
    m.add_class::<PyCalibrationResult>()?;
    m.add_class::<PyNoiseOutput>()?;
    m.add_function(wrap_pyfunction!(erf, m)?)?;
    m.add_function(wrap_pyfunction!(erfc, m)?)?;
    m.add_function(wrap_pyfunction!(std_normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(log_std_normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(std_normal_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(quantile_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_floor, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_from_sigma_standard, m)?)?;
    m.add_function(wrap_pyfunction!(balle_lhs, m)?)?;
    m.add_function(wrap_pyfunction!(suffcrit_probability, m)?)?;
    m.add_function(wrap_pyfunction!(solve_sufficient_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(solve_analytic_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(g_value, m)?)?;
    m.add_function(wrap_pyfunction!(d_value, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_r, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_r_deps, m)?)?;
    m.add_function(wrap_pyfunction!(crossover_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(rho_value, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_surface, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gaussian_mechanism, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_and_sample, m)?)?;
    Ok(())
}
