use endscope::classify::{end_signature, sweep_power_family, SweepSpec};
use endscope::cli::config::RunConfig;
use endscope::cli::report::{analyze_ends, Report};
use endscope::geometry::{power_revolution_end, BuiltinEnd, ModelEnd};
use endscope::quadrature::QuadratureConfig;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

const DEFAULT_P_GRID: [f64; 8] = [2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0];

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Hands a serializable value to Python as plain dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn signature<'py>(py: Python<'py>, end: ModelEnd, p_grid: Option<Vec<f64>>) -> PyResult<Bound<'py, PyAny>> {
    let ps = p_grid.unwrap_or_else(|| DEFAULT_P_GRID.to_vec());
    let sig = py
        .detach(|| end_signature(&end, &ps, &QuadratureConfig::default()))
        .map_err(value_error)?;
    to_py(py, &sig)
}

/// Names accepted by `classify_builtin`.
#[pyfunction]
fn builtin_ends() -> Vec<&'static str> {
    BuiltinEnd::ALL.iter().map(BuiltinEnd::name).collect()
}

/// Volume, `L^p` and parabolicity verdicts for a builtin end.
#[pyfunction]
#[pyo3(signature = (name, m, p_grid=None))]
fn classify_builtin<'py>(
    py: Python<'py>,
    name: &str,
    m: u32,
    p_grid: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let b = BuiltinEnd::from_name(name).ok_or_else(|| value_error(format!("unknown builtin end {name:?}")))?;
    signature(py, b.build(m).map_err(value_error)?, p_grid)
}

/// Same as `classify_builtin` for the surface of revolution `f = t^alpha`.
#[pyfunction]
#[pyo3(signature = (m, alpha, p_grid=None))]
fn classify_power<'py>(py: Python<'py>, m: u32, alpha: f64, p_grid: Option<Vec<f64>>) -> PyResult<Bound<'py, PyAny>> {
    signature(py, power_revolution_end(m, alpha).map_err(value_error)?, p_grid)
}

/// Runs `analyze` on a TOML config and returns the report.
#[pyfunction]
fn analyze<'py>(py: Python<'py>, config_toml: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = RunConfig::from_toml(config_toml, "<string>").map_err(value_error)?;
    let mut rep = Report::new(&cfg);
    rep.ends = py.detach(|| analyze_ends(&cfg)).map_err(value_error)?;
    to_py(py, &rep)
}

/// Phase table of the power family; arguments default to the standard grid.
#[pyfunction]
#[pyo3(signature = (dimensions=None, alphas=None, p_grid=None))]
fn sweep<'py>(
    py: Python<'py>,
    dimensions: Option<Vec<u32>>,
    alphas: Option<Vec<f64>>,
    p_grid: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let d = SweepSpec::default();
    let spec = SweepSpec {
        dimensions: dimensions.unwrap_or(d.dimensions),
        alphas: alphas.unwrap_or(d.alphas),
        p_grid: p_grid.unwrap_or(d.p_grid),
    };
    let table = py
        .detach(|| sweep_power_family(&spec, &QuadratureConfig::default()))
        .map_err(value_error)?;
    to_py(py, &table)
}

#[pymodule]
fn endscope_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(builtin_ends, m)?)?;
    m.add_function(wrap_pyfunction!(classify_builtin, m)?)?;
    m.add_function(wrap_pyfunction!(classify_power, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
