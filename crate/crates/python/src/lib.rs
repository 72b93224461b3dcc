//! Python bindings. Structured results (condition reports, maximizer paths,
//! presets) cross the boundary as plain dictionaries.

use mcslab::conditions::{self, check_d_dara, GridFn, Tolerance};
use mcslab::oracle::{gateaux_local, oracle_compare, OracleConfig};
use mcslab::presets;
use mcslab::problems::precautionary_motive;
use mcslab::{argmax_set, check_proposition, verify_mcs, McsConfig, PropGrids, PropId};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(
    mcslab,
    McslabError,
    PyException,
    "Raised for invalid inputs and domain errors."
);

fn err(e: impl std::fmt::Display) -> PyErr {
    McslabError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accepts a JSON string or any value `json.dumps` can encode.
fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = match obj.cast::<PyString>() {
        Ok(s) => s.to_str()?.to_owned(),
        Err(_) => obj
            .py()
            .import("json")?
            .call_method1("dumps", (obj,))?
            .extract()?,
    };
    serde_json::from_str(&text).map_err(err)
}

fn tolerance(abs: Option<f64>, rel: Option<f64>) -> Tolerance {
    let d = Tolerance::default();
    Tolerance::new(abs.unwrap_or(d.abs), rel.unwrap_or(d.rel))
}

/// A finite-support probability distribution on the real line.
#[pyclass(module = "mcslab", frozen, from_py_object)]
#[derive(Clone)]
struct Lottery(mcslab::Lottery);

#[pymethods]
impl Lottery {
    #[new]
    fn new(support: Vec<f64>, probs: Vec<f64>) -> PyResult<Self> {
        if support.len() != probs.len() {
            return Err(err("support and probs differ in length"));
        }
        mcslab::Lottery::new(support.into_iter().zip(probs))
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn degenerate(z: f64) -> Self {
        Self(mcslab::Lottery::degenerate(z))
    }

    #[staticmethod]
    fn from_json(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        from_py(obj).map(Self)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(err)
    }

    #[getter]
    fn support(&self) -> Vec<f64> {
        self.0.support().to_vec()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.0.probs().to_vec()
    }

    fn cdf(&self, z: f64) -> f64 {
        self.0.cdf(z)
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn mix(&self, other: &Lottery, a: f64) -> PyResult<Self> {
        self.0.mix(&other.0, a).map(Self).map_err(err)
    }

    fn shift(&self, c: f64) -> Self {
        Self(self.0.shift(c))
    }

    #[pyo3(signature = (other, order = 1))]
    fn dominates(&self, other: &Lottery, order: u8) -> PyResult<bool> {
        self.0.dominates(&other.0, order).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        let atoms: Vec<String> = self.0.iter().map(|(z, p)| format!("{z}: {p}")).collect();
        format!("Lottery({{{}}})", atoms.join(", "))
    }
}

/// A preference functional over lotteries with its local utility.
#[pyclass(module = "mcslab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PreferenceModel(mcslab::PreferenceModel);

#[pymethods]
impl PreferenceModel {
    #[staticmethod]
    fn from_json(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        from_py(obj).map(Self)
    }

    #[staticmethod]
    fn eu(u: &str) -> PyResult<Self> {
        mcslab::PreferenceModel::eu(u.parse().map_err(err)?)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn rdu(omega: &str, u: &str) -> PyResult<Self> {
        mcslab::PreferenceModel::rdu(omega.parse().map_err(err)?, u.parse().map_err(err)?)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn quadratic(alpha: f64, beta: f64) -> PyResult<Self> {
        mcslab::PreferenceModel::quadratic(alpha, beta)
            .map(Self)
            .map_err(err)
    }

    /// Components are `(coefficient, mass)` pairs.
    #[staticmethod]
    fn cara_mixture(components: Vec<(f64, f64)>) -> PyResult<Self> {
        mcslab::PreferenceModel::cara_mixture(&components)
            .map(Self)
            .map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind()
    }

    fn evaluate(&self, f: &Lottery) -> PyResult<f64> {
        self.0.evaluate(&f.0).map_err(err)
    }

    fn local_utility(&self, z: f64, f: &Lottery) -> PyResult<f64> {
        self.0.local_utility(z, &f.0).map_err(err)
    }

    #[pyo3(signature = (z, f, k = 1))]
    fn local_utility_deriv(&self, z: f64, f: &Lottery, k: u8) -> PyResult<f64> {
        self.0.local_utility_deriv(z, &f.0, k).map_err(err)
    }

    /// Numeric Gateaux derivative toward `delta_z`, centered to mean zero under `f`.
    #[pyo3(signature = (z, f, order = 1))]
    fn gateaux_local(&self, z: f64, f: &Lottery, order: usize) -> PyResult<f64> {
        let cfg = OracleConfig::default().with_order(order).map_err(err)?;
        gateaux_local(&self.0, z, &f.0, &cfg).map_err(err)
    }

    /// Largest centered gap between analytic and numeric local utilities.
    #[pyo3(signature = (f, z_grid, order = 1))]
    fn oracle_error(&self, f: &Lottery, z_grid: Vec<f64>, order: usize) -> PyResult<f64> {
        let cfg = OracleConfig::default().with_order(order).map_err(err)?;
        oracle_compare(&self.0, &f.0, &z_grid, &cfg).map_err(err)
    }

    #[pyo3(signature = (y_grid, t_grid, bases, abs_tol = None, rel_tol = None))]
    fn check_d_dara<'py>(
        &self,
        py: Python<'py>,
        y_grid: Vec<f64>,
        t_grid: Vec<f64>,
        bases: Vec<Lottery>,
        abs_tol: Option<f64>,
        rel_tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let bases: Vec<_> = bases.into_iter().map(|b| b.0).collect();
        let r = check_d_dara(
            &self.0,
            &y_grid,
            &t_grid,
            &bases,
            &tolerance(abs_tol, rel_tol),
        )
        .map_err(err)?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!(
            "PreferenceModel({})",
            serde_json::to_string(&self.0).unwrap_or_default()
        )
    }
}

/// A one-parameter decision problem.
#[pyclass(module = "mcslab", frozen)]
struct Problem(mcslab::ProblemSpec);

#[pymethods]
impl Problem {
    #[staticmethod]
    fn from_json(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        let spec: mcslab::ProblemSpec = from_py(obj)?;
        spec.validate().map_err(err)?;
        Ok(Self(spec))
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        presets::preset(name).map(|p| Self(p.problem)).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind()
    }

    fn objective(&self, x: f64, theta: f64) -> PyResult<f64> {
        self.0.objective(x, theta).map_err(err)
    }

    fn action_domain(&self, theta: f64) -> PyResult<(f64, f64)> {
        self.0.action_domain(theta).map_err(err)
    }

    /// The maximizer set at `theta`.
    fn solve<'py>(&self, py: Python<'py>, theta: f64) -> PyResult<Bound<'py, PyAny>> {
        let set = py
            .detach(|| {
                let inst = self.0.at(theta)?;
                argmax_set(
                    |x| inst.objective(x),
                    inst.action_domain()?,
                    &Default::default(),
                )
            })
            .map_err(err)?;
        to_py(py, &set)
    }

    #[pyo3(signature = (theta_grid, exhaustive = false, x_tol = 1e-6))]
    fn verify_mcs<'py>(
        &self,
        py: Python<'py>,
        theta_grid: Vec<f64>,
        exhaustive: bool,
        x_tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = McsConfig {
            exhaustive,
            x_tol,
            ..McsConfig::default()
        };
        let path = py
            .detach(|| verify_mcs(&self.0, &theta_grid, &cfg))
            .map_err(err)?;
        to_py(py, &path)
    }

    /// Checks the hypotheses of proposition `prop` (for example `"P1"`).
    /// `grids` may override any field of the sampling grids.
    #[pyo3(signature = (prop, theta_grid, grids = None, abs_tol = None, rel_tol = None))]
    fn check<'py>(
        &self,
        py: Python<'py>,
        prop: &str,
        theta_grid: Vec<f64>,
        grids: Option<&Bound<'py, PyAny>>,
        abs_tol: Option<f64>,
        rel_tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let prop: PropId = prop.parse().map_err(err)?;
        let mut g: PropGrids = match grids {
            Some(obj) => from_py(obj)?,
            None => PropGrids::default(),
        };
        g.theta_grid = theta_grid;
        let tol = tolerance(abs_tol, rel_tol);
        let r = py
            .detach(|| check_proposition(&self.0, prop, &g, &tol))
            .map_err(err)?;
        to_py(py, &r)
    }

    #[pyo3(signature = (theta = 0.0))]
    fn precautionary_motive<'py>(
        &self,
        py: Python<'py>,
        theta: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let out = py
            .detach(|| precautionary_motive(&self.0, theta))
            .map_err(err)?;
        to_py(py, &out)
    }
}

/// Runs a grid checker on values sampled over the product of `axes`
/// (row-major, last axis fastest).
#[pyfunction]
#[pyo3(signature = (condition, axes, values, abs_tol = None, rel_tol = None))]
fn check_grid<'py>(
    py: Python<'py>,
    condition: &str,
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let g = GridFn::new(axes, values).map_err(err)?;
    let tol = tolerance(abs_tol, rel_tol);
    let r = match condition {
        "log-spm" => conditions::is_log_spm(&g, &tol),
        "supermodular" => conditions::is_supermodular(&g, &tol),
        "sc1" => conditions::is_sc1(&g, &tol),
        "sc2" => conditions::is_sc2(&g, &tol),
        "interval-dominance" => conditions::interval_dominance(&g, &tol),
        "convex" => conditions::is_convex(&g, &tol),
        other => return Err(err(format!("unknown condition `{other}`"))),
    }
    .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    presets::NAMES.to_vec()
}

/// The preset as a dictionary with `problem`, `theta_grid` and `prop`.
#[pyfunction]
fn preset<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &presets::preset(name).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "mcslab")]
fn mcslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("McslabError", m.py().get_type::<McslabError>())?;
    m.add_class::<Lottery>()?;
    m.add_class::<PreferenceModel>()?;
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(check_grid, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    Ok(())
}
