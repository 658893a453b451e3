//! Python bindings: functions, means, gaps, exponent fits, weights and
//! equivalence reports. Structured results come back as plain dicts.

use meanlip::asymptotics::{self, GridKind, MeanProfile};
use meanlip::corpus;
use meanlip::equivalence::{self, Condition};
use meanlip::means;
use meanlip::weights;
use meanlip::{AnalyticFunction, Complex, FunctionSpec, QuadratureConfig, SpaceSpec};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(meanlip_py, MeanlipError, PyException);

fn to_py(e: meanlip::Error) -> PyErr {
    use meanlip::Error::*;
    match e {
        Spec(_) | InvalidArgument(_) | InvalidWeight(_) | OutOfDomain(_) | OutsideDisc(_) | RadiusTooLarge { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => MeanlipError::new_err(other.to_string()),
    }
}

fn space(name: &str, p: f64) -> PyResult<SpaceSpec> {
    let s = match name.to_ascii_lowercase().as_str() {
        "hardy" | "h" => SpaceSpec::Hardy { p },
        "bergman" | "a" => SpaceSpec::Bergman { p },
        "dirichlet" | "d" => SpaceSpec::Dirichlet,
        "disc_algebra" | "disc-algebra" | "disc" => SpaceSpec::DiscAlgebra,
        other => return Err(PyValueError::new_err(format!("unknown space {other:?}"))),
    };
    s.validate().map_err(to_py)?;
    Ok(s)
}

/// Round-trips a serializable value through JSON into Python objects.
fn to_object<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| MeanlipError::new_err(e.to_string()))?;
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

fn config(tol: Option<f64>) -> PyResult<QuadratureConfig> {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = tol {
        cfg.rel_tol = t;
    }
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

/// An analytic function on the unit disc.
#[pyclass(name = "Function", module = "meanlip_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFunction {
    inner: AnalyticFunction,
    label: String,
}

#[pymethods]
impl PyFunction {
    /// Parses `monomial:3`, `lacunary:0.5`, `poly:1,0,2`, `binomial:0.5`, ...
    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        let inner = FunctionSpec::parse_short(spec).and_then(|s| s.build()).map_err(to_py)?;
        Ok(Self { inner, label: spec.to_string() })
    }

    #[staticmethod]
    fn polynomial(coefficients: Vec<Complex>) -> Self {
        Self {
            inner: AnalyticFunction::polynomial(coefficients),
            label: "polynomial".into(),
        }
    }

    #[staticmethod]
    fn monomial(n: u32) -> Self {
        Self { inner: AnalyticFunction::monomial(n), label: format!("monomial:{n}") }
    }

    #[staticmethod]
    fn lacunary(alpha: f64) -> Self {
        Self { inner: AnalyticFunction::lacunary(alpha), label: format!("lacunary:{alpha}") }
    }

    #[staticmethod]
    fn binomial(beta: f64) -> Self {
        Self { inner: AnalyticFunction::binomial_power(beta), label: format!("binomial:{beta}") }
    }

    fn __call__(&self, z: Complex) -> PyResult<Complex> {
        self.inner.eval_at(z).map_err(to_py)
    }

    fn derivative(&self) -> Self {
        Self { inner: self.inner.derivative(), label: format!("d/dz {}", self.label) }
    }

    fn dilate(&self, r: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.dilate(r).map_err(to_py)?, label: format!("{} dilated by {r}", self.label) })
    }

    fn rotate(&self, t: f64) -> Self {
        Self { inner: self.inner.rotate(t), label: format!("{} rotated by {t}", self.label) }
    }

    fn __repr__(&self) -> String {
        format!("Function({:?})", self.label)
    }
}

#[pyfunction]
#[pyo3(signature = (f, p, r, tol=None))]
fn hardy_mean(f: &PyFunction, p: f64, r: f64, tol: Option<f64>) -> PyResult<f64> {
    Ok(means::hardy_mean(&f.inner, p, r, &config(tol)?).map_err(to_py)?.value)
}

#[pyfunction]
#[pyo3(signature = (f, p, r, tol=None))]
fn area_mean(f: &PyFunction, p: f64, r: f64, tol: Option<f64>) -> PyResult<f64> {
    Ok(means::area_mean(&f.inner, p, r, &config(tol)?).map_err(to_py)?.value)
}

#[pyfunction]
#[pyo3(signature = (f, r, tol=None))]
fn sup_mean(f: &PyFunction, r: f64, tol: Option<f64>) -> PyResult<f64> {
    Ok(means::sup_mean(&f.inner, r, &config(tol)?).map_err(to_py)?.value)
}

#[pyfunction]
#[pyo3(signature = (f, space_name, p=2.0, tol=None))]
fn space_norm(f: &PyFunction, space_name: &str, p: f64, tol: Option<f64>) -> PyResult<f64> {
    Ok(means::space_norm(&f.inner, &space(space_name, p)?, &config(tol)?).map_err(to_py)?.value)
}

#[pyfunction]
#[pyo3(signature = (f, space_name, p=2.0))]
fn coefficient_norm(f: &PyFunction, space_name: &str, p: f64) -> PyResult<f64> {
    means::coefficient_norm_oracle(&f.inner, &space(space_name, p)?).map_err(to_py)
}

/// `‖f_r − f‖` in the given space.
#[pyfunction]
#[pyo3(signature = (f, r, space_name, p=2.0, tol=None))]
fn dilation_gap(f: &PyFunction, r: f64, space_name: &str, p: f64, tol: Option<f64>) -> PyResult<f64> {
    Ok(means::dilation_gap(&f.inner, r, &space(space_name, p)?, &config(tol)?).map_err(to_py)?.value)
}

/// `‖r_t f − f‖` in the given space.
#[pyfunction]
#[pyo3(signature = (f, t, space_name, p=2.0, tol=None))]
fn rotation_gap(f: &PyFunction, t: f64, space_name: &str, p: f64, tol: Option<f64>) -> PyResult<f64> {
    Ok(means::rotation_gap(&f.inner, t, &space(space_name, p)?, &config(tol)?).map_err(to_py)?.value)
}

/// Profile of condition `a`, `b` or `c` on the dyadic grid `k_min..=k_max`,
/// as a list of `(parameter, value)` pairs.
#[pyfunction]
#[pyo3(signature = (f, condition, space_name, p=2.0, k_min=4, k_max=12))]
fn condition_profile(f: &PyFunction, condition: &str, space_name: &str, p: f64, k_min: u32, k_max: u32) -> PyResult<Vec<(f64, f64)>> {
    let c = Condition::parse(condition).map_err(to_py)?;
    let profile = equivalence::condition_profile(&f.inner, &space(space_name, p)?, c, k_min, k_max, &QuadratureConfig::default())
        .map_err(to_py)?;
    Ok(profile.points.iter().map(|p| (p.parameter, p.value)).collect())
}

/// Fits `V ≍ C x^{α + offset}` to `(x, value)` pairs.
#[pyfunction]
#[pyo3(signature = (abscissas, values, offset=0.0))]
fn fit_exponent(py: Python<'_>, abscissas: Vec<f64>, values: Vec<f64>, offset: f64) -> PyResult<Py<PyAny>> {
    if abscissas.len() != values.len() {
        return Err(PyValueError::new_err("abscissas and values differ in length"));
    }
    let pairs: Vec<(f64, f64)> = abscissas.into_iter().zip(values).collect();
    let profile = MeanProfile::from_pairs(GridKind::RadiusToOne, &pairs).map_err(to_py)?;
    let fit = asymptotics::fit_exponent(&profile, offset).map_err(to_py)?;
    to_object(py, &fit)
}

/// Classifies `power:a`, `powerlog:a,b` or a JSON weight.
#[pyfunction]
fn classify_weight(py: Python<'_>, spec: &str) -> PyResult<Py<PyAny>> {
    let w = weights::parse_weight(spec).map_err(to_py)?;
    to_object(py, &weights::classify_weight(&w).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (f, space_name, p=2.0, alpha=None, weight=None, k_min=4, k_max=12))]
#[allow(clippy::too_many_arguments)]
fn equivalence_report(
    py: Python<'_>,
    f: &PyFunction,
    space_name: &str,
    p: f64,
    alpha: Option<f64>,
    weight: Option<&str>,
    k_min: u32,
    k_max: u32,
) -> PyResult<Py<PyAny>> {
    let w = weight.map(weights::parse_weight).transpose().map_err(to_py)?;
    let sp = space(space_name, p)?;
    let report = py
        .detach(|| {
            equivalence::equivalence_report(&f.inner, &f.label, &sp, alpha, w.as_ref(), (k_min, k_max), &QuadratureConfig::default())
        })
        .map_err(to_py)?;
    to_object(py, &report)
}

/// Ids of the built-in corpus.
#[pyfunction]
fn corpus_ids() -> Vec<&'static str> {
    corpus::DEFAULT_SPECS.to_vec()
}

#[pymodule]
pub fn meanlip_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MeanlipError", m.py().get_type::<MeanlipError>())?;
    m.add_class::<PyFunction>()?;
    m.add_function(wrap_pyfunction!(hardy_mean, m)?)?;
    m.add_function(wrap_pyfunction!(area_mean, m)?)?;
    m.add_function(wrap_pyfunction!(sup_mean, m)?)?;
    m.add_function(wrap_pyfunction!(space_norm, m)?)?;
    m.add_function(wrap_pyfunction!(coefficient_norm, m)?)?;
    m.add_function(wrap_pyfunction!(dilation_gap, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_gap, m)?)?;
    m.add_function(wrap_pyfunction!(condition_profile, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(classify_weight, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence_report, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_ids, m)?)?;
    Ok(())
}
