//! Python bindings: charts, check runs, and JSON reports.
//!
//! The module exposes the chart constructors and the suite runner; run
//! results come back as the same JSON documents the command-line front
//! end writes, so Python callers can `json.loads` them directly.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qcgeom::qcframe::QcChart;
use qcgeom::suite::{RunConfig, SuiteSelection};
use qcgeom::{atlas, Error};

fn to_py_err(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// A coordinate chart carrying a quaternionic contact structure.
#[pyclass(frozen)]
pub struct Chart {
    inner: QcChart,
}

#[pymethods]
impl Chart {
    /// The flat quaternionic Heisenberg chart of dimension 4n + 3.
    #[staticmethod]
    fn heisenberg(n: usize) -> PyResult<Self> {
        atlas::heisenberg(n)
            .map(|inner| Chart { inner })
            .map_err(to_py_err)
    }

    /// The round-sphere chart with its standard 3-Sasakian structure.
    #[staticmethod]
    fn sphere_3sasakian(n: usize) -> PyResult<Self> {
        atlas::sphere_3sasakian(n)
            .map(|inner| Chart { inner })
            .map_err(to_py_err)
    }

    /// Parses a chart from its JSON form.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        atlas::chart_from_json(text)
            .map(|inner| Chart { inner })
            .map_err(to_py_err)
    }

    /// The chart as JSON (the same format `from_json` accepts).
    fn to_json(&self) -> String {
        atlas::chart_to_json(&self.inner)
    }

    /// A new chart with contact forms scaled by the positive factor
    /// `factor`, an expression in the chart coordinates.
    fn conformal_deform(&self, factor: &str) -> PyResult<Self> {
        atlas::conformal_deform(&self.inner, factor)
            .map(|inner| Chart { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn coordinates(&self) -> Vec<String> {
        self.inner.coords.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Chart(label={:?}, n={}, dim={})",
            self.inner.label,
            self.inner.n,
            self.inner.dim()
        )
    }
}

/// Runs the selected check suites at seeded rational sample points and
/// returns the full report as a JSON string.
#[pyfunction]
#[pyo3(signature = (
    chart,
    points = 3,
    seed = 0,
    jet_order = 3,
    coeff_bound = 7,
    suites = "structure,torsion,theorem,cone",
    prescreen = false,
))]
fn check(
    chart: &Chart,
    points: u64,
    seed: u64,
    jet_order: u32,
    coeff_bound: u32,
    suites: &str,
    prescreen: bool,
) -> PyResult<String> {
    let config = RunConfig {
        chart: chart.inner.clone(),
        points,
        seed,
        jet_order,
        coeff_bound,
        suites: SuiteSelection::parse(suites).map_err(to_py_err)?,
        prescreen,
    };
    qcgeom::suite::run(&config)
        .map(|report| report.to_json())
        .map_err(to_py_err)
}

/// Python module definition.
#[pymodule]
fn qcgeom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Chart>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}
