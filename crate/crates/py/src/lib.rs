//! Python bindings. Polynomials, normal forms and brick samples are wrapped as
//! classes; reports come back as plain dicts.

use birkhoff_core::arith;
use birkhoff_core::bnf::{self, NormalFormResult, NormalizeOptions};
use birkhoff_core::brick::{self, BrickSample};
use birkhoff_core::builtins::Builtin;
use birkhoff_core::dynamics::{self, IntegrateOptions, ScalingOptions};
use birkhoff_core::genericity::{self, RescaleContext, VolumeOptions};
use birkhoff_core::polyalg::{self, Frequency, GradedPolynomial, Precision};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

create_exception!(birkhoff, BirkhoffError, PyValueError);

fn err(e: birkhoff_core::Error) -> PyErr {
    BirkhoffError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj
        .py()
        .import("json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Real polynomial in `(x, y)` stored in complex coordinates.
#[pyclass(name = "Polynomial", module = "birkhoff", frozen, from_py_object)]
#[derive(Clone)]
struct PyPolynomial(GradedPolynomial);

#[pymethods]
impl PyPolynomial {
    /// Parse the canonical text form, one term `a.. | b.. | re im` per line.
    #[staticmethod]
    fn from_text(n: usize, text: &str) -> PyResult<Self> {
        GradedPolynomial::from_text(n, text).map(Self).map_err(err)
    }

    /// Named family, e.g. `builtin("quartic-1dof", c=0.5)`.
    #[staticmethod]
    #[pyo3(signature = (family, **params))]
    fn builtin(py: Python<'_>, family: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let spec = match params {
            Some(p) => p.copy()?,
            None => PyDict::new(py),
        };
        spec.set_item("family", family)?;
        let b: Builtin = from_py(spec.as_any())?;
        b.build().map(Self).map_err(err)
    }

    /// `Σ ω_j I_j`
    #[staticmethod]
    fn harmonic(omega: Vec<f64>) -> Self {
        Self(GradedPolynomial::linear_actions(&omega))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn eval(&self, z: Vec<f64>) -> PyResult<f64> {
        if z.len() != 2 * self.0.n() {
            return Err(err(birkhoff_core::Error::Dimension {
                expected: self.0.n(),
                found: z.len() / 2,
            }));
        }
        Ok(self.0.eval(&z))
    }

    fn bracket(&self, other: &PyPolynomial) -> PyResult<Self> {
        polyalg::poisson_bracket(&self.0, &other.0)
            .map(Self)
            .map_err(err)
    }

    fn __add__(&self, other: &PyPolynomial) -> PyResult<Self> {
        if self.0.n() != other.0.n() {
            return Err(PyValueError::new_err("dimension mismatch"));
        }
        Ok(Self(self.0.add(&other.0)))
    }

    fn __mul__(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    fn __repr__(&self) -> String {
        format!(
            "Polynomial(n={}, terms={})",
            self.0.n(),
            self.0.terms().count()
        )
    }
}

/// Polynomial in the actions `I`.
#[pyclass(name = "ActionPolynomial", module = "birkhoff", frozen, from_py_object)]
#[derive(Clone)]
struct PyActionPolynomial(polyalg::ActionPolynomial);

#[pymethods]
impl PyActionPolynomial {
    /// Text form `l.. | coeff` per line.
    #[staticmethod]
    fn from_text(n: usize, text: &str) -> PyResult<Self> {
        polyalg::ActionPolynomial::from_text(n, text)
            .map(Self)
            .map_err(err)
    }

    /// From `{(l_1, …, l_n): coeff}`.
    #[staticmethod]
    fn from_dict(n: usize, terms: Vec<(Vec<u8>, f64)>) -> PyResult<Self> {
        polyalg::ActionPolynomial::from_terms(n, terms)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn terms(&self) -> Vec<(Vec<u8>, f64)> {
        self.0.terms().map(|(l, c)| (l.to_vec(), c)).collect()
    }

    fn coeff(&self, l: Vec<u8>) -> f64 {
        self.0.coeff(&l)
    }

    fn eval(&self, actions: Vec<f64>) -> f64 {
        self.0.eval(&actions)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    /// Bombieri norm of the homogeneous degree-`k` part.
    fn bombieri_norm(&self, k: usize) -> PyResult<f64> {
        polyalg::bombieri_norm(&self.0.homogeneous(k), k).map_err(err)
    }

    /// Lift to phase space, `I_j = (x_j² + y_j²)/2`.
    fn to_polynomial(&self) -> PyPolynomial {
        PyPolynomial(self.0.to_graded())
    }

    fn __eq__(&self, other: &PyActionPolynomial) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("ActionPolynomial(n={}, {:?})", self.0.n(), self.terms())
    }
}

#[pyclass(name = "NormalForm", module = "birkhoff", frozen)]
struct PyNormalForm(NormalFormResult);

#[pymethods]
impl PyNormalForm {
    #[getter]
    fn omega(&self) -> Vec<f64> {
        self.0.omega.as_slice().to_vec()
    }

    #[getter]
    fn invariants(&self) -> Vec<PyActionPolynomial> {
        self.0
            .invariants
            .iter()
            .cloned()
            .map(PyActionPolynomial)
            .collect()
    }

    #[getter]
    fn remainder(&self) -> PyPolynomial {
        PyPolynomial(self.0.remainder.clone())
    }

    fn integrable_part(&self) -> PyActionPolynomial {
        PyActionPolynomial(self.0.integrable_part())
    }

    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.report())
    }

    fn torsion<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let b2 = self
            .0
            .invariants
            .get(1)
            .ok_or_else(|| PyValueError::new_err("torsion needs m >= 2"))?;
        to_py(py, &genericity::torsion_class(b2).map_err(err)?)
    }

    /// Rescaled integrable part and remainder on the ball of radius `s_m`.
    #[pyo3(signature = (s_m, s, r_m = 1.0))]
    fn rescale<'py>(
        &self,
        py: Python<'py>,
        s_m: f64,
        s: f64,
        r_m: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let ctx =
            RescaleContext::new(self.0.omega.n(), self.0.order_m, s_m, s, r_m).map_err(err)?;
        let k = genericity::rescale(&self.0, &ctx).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item(
            "parts",
            k.parts
                .iter()
                .cloned()
                .map(PyActionPolynomial)
                .collect::<Vec<_>>(),
        )?;
        d.set_item("remainder", PyPolynomial(k.remainder.clone()))?;
        d.set_item("context", to_py(py, &ctx)?)?;
        Ok(d.into_any())
    }
}

#[pyclass(name = "BrickSample", module = "birkhoff", frozen)]
struct PyBrickSample(BrickSample);

#[pymethods]
impl PyBrickSample {
    #[new]
    #[pyo3(signature = (n, m, seed = 0))]
    fn new(n: usize, m: usize, seed: u64) -> PyResult<Self> {
        brick::sample_brick(n, m, seed).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(Self)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("brick samples serialize")
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    #[getter]
    fn parts(&self) -> Vec<PyActionPolynomial> {
        self.0
            .parts
            .iter()
            .cloned()
            .map(PyActionPolynomial)
            .collect()
    }

    fn extend_to(&self, m: usize) -> Self {
        Self(self.0.extend_to(m))
    }

    fn total(&self) -> PyActionPolynomial {
        PyActionPolynomial(self.0.total())
    }

    /// `H + h` and the frequency of its quadratic part.
    fn perturb(&self, h: &PyPolynomial) -> PyResult<(PyPolynomial, Vec<f64>)> {
        let (p, w) = brick::perturb(&h.0, &self.0).map_err(err)?;
        Ok((PyPolynomial(p), w.as_slice().to_vec()))
    }
}

fn parse_precision(p: &str) -> PyResult<Precision> {
    serde_json::from_value(serde_json::Value::String(p.into())).map_err(|_| {
        PyValueError::new_err(format!(
            "precision must be 'double' or 'double-double', got {p:?}"
        ))
    })
}

#[pyfunction]
#[pyo3(signature = (h, m, trunc = None, precision = "double"))]
fn normalize(
    py: Python<'_>,
    h: &PyPolynomial,
    m: usize,
    trunc: Option<usize>,
    precision: &str,
) -> PyResult<PyNormalForm> {
    let mut opts = NormalizeOptions::new(m).precision(parse_precision(precision)?);
    if let Some(t) = trunc {
        opts = opts.trunc(t);
    }
    let h = h.0.clone();
    py.detach(move || bnf::normalize_with(&h, opts))
        .map(PyNormalForm)
        .map_err(err)
}

#[pyfunction]
fn diophantine_gamma<'py>(
    py: Python<'py>,
    omega: Vec<f64>,
    tau: f64,
    k_max: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let w = Frequency::new(omega).map_err(err)?;
    to_py(py, &arith::diophantine_gamma(&w, tau, k_max).map_err(err)?)
}

fn parts_of(p: Vec<PyActionPolynomial>) -> Vec<polyalg::ActionPolynomial> {
    p.into_iter().map(|a| a.0).collect()
}

/// Birkhoff invariants of `base + Σ P_j`.
#[pyfunction]
fn bnf_map(
    base: &PyPolynomial,
    m: usize,
    p: Vec<PyActionPolynomial>,
) -> PyResult<Vec<PyActionPolynomial>> {
    let q = genericity::bnf_map(&base.0, m, &parts_of(p)).map_err(err)?;
    Ok(q.into_iter().map(PyActionPolynomial).collect())
}

#[pyfunction]
#[pyo3(signature = (base, m, p, step = 1e-4))]
fn jacobian_unit_check<'py>(
    py: Python<'py>,
    base: &PyPolynomial,
    m: usize,
    p: Vec<PyActionPolynomial>,
    step: f64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &genericity::jacobian_unit_check(&base.0, m, &parts_of(p), step).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (h, rho, eps, samples = 10_000, grid = 101, seed = 0))]
fn bad_parameter_volume<'py>(
    py: Python<'py>,
    h: &PyActionPolynomial,
    rho: f64,
    eps: Vec<f64>,
    samples: usize,
    grid: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = VolumeOptions {
        samples,
        grid,
        seed,
    };
    let h = h.0.clone();
    let rows = py
        .detach(move || genericity::bad_volume_sweep(&h, rho, &eps, &opts))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("rows", to_py(py, &rows)?)?;
    d.set_item("slope", to_py(py, &genericity::loglog_slope(&rows).ok())?)?;
    Ok(d.into_any())
}

#[pyfunction]
fn point_from_actions(actions: Vec<f64>, phases: Vec<f64>) -> Vec<f64> {
    dynamics::point_from_actions(&actions, &phases)
}

#[pyfunction]
#[pyo3(signature = (h, z0, dt, t_max, stride = 1, domain_radius = 1.0))]
fn integrate<'py>(
    py: Python<'py>,
    h: &PyPolynomial,
    z0: Vec<f64>,
    dt: f64,
    t_max: f64,
    stride: usize,
    domain_radius: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = IntegrateOptions {
        domain_radius,
        stride,
    };
    let h = h.0.clone();
    let rec = py
        .detach(move || dynamics::integrate(&h, &z0, dt, t_max, &opts))
        .map_err(err)?;
    to_py(py, &rec)
}

#[pyfunction]
#[pyo3(signature = (h, z0, c, t_max, dt, domain_radius = 1.0))]
fn stability_time<'py>(
    py: Python<'py>,
    h: &PyPolynomial,
    z0: Vec<f64>,
    c: f64,
    t_max: f64,
    dt: f64,
    domain_radius: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = IntegrateOptions {
        domain_radius,
        stride: 1,
    };
    to_py(
        py,
        &dynamics::stability_time(&h.0, &z0, c, t_max, dt, &opts).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (h, rhos, c, t_max, dt, random_directions = 5, seed = 0, domain_radius = 1.0))]
#[allow(clippy::too_many_arguments)]
fn scaling_experiment<'py>(
    py: Python<'py>,
    h: &PyPolynomial,
    rhos: Vec<f64>,
    c: f64,
    t_max: f64,
    dt: f64,
    random_directions: usize,
    seed: u64,
    domain_radius: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let dirs = dynamics::initial_directions(h.0.n(), random_directions, seed);
    let opts = ScalingOptions {
        c,
        t_max,
        dt,
        domain_radius,
    };
    let h = h.0.clone();
    let curve = py
        .detach(move || dynamics::scaling_experiment(&h, &rhos, &dirs, &opts))
        .map_err(err)?;
    to_py(py, &curve)
}

#[pymodule]
fn birkhoff(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BirkhoffError", m.py().get_type::<BirkhoffError>())?;
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyActionPolynomial>()?;
    m.add_class::<PyNormalForm>()?;
    m.add_class::<PyBrickSample>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(diophantine_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(bnf_map, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian_unit_check, m)?)?;
    m.add_function(wrap_pyfunction!(bad_parameter_volume, m)?)?;
    m.add_function(wrap_pyfunction!(point_from_actions, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(stability_time, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_experiment, m)?)?;
    Ok(())
}
