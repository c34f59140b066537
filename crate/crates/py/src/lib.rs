//! Python bindings. Structured results come back as plain dicts and lists.

use conical_core::causality::{escaping_family, generalized_crossing, oscillating_family};
use conical_core::metric::{
    lower_bound_margin, metric_cartesian, pullback_residual, sobolev_probe as probe,
    FieldComponent, QuadratureSpec,
};
use conical_core::regularization::{
    Mollifier as CoreMollifier, RegularizedField as CoreField, SampleSpec,
};
use conical_core::wave::{self, Grid2D, InitialData, SpatialOperator, DEFAULT_CFL};
use conical_core::{ConicalParams, SpacetimePoint};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

fn err(e: conical_core::Error) -> PyErr {
    use conical_core::Error::*;
    match e {
        Io(_) | Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn from_py<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let s: String = obj
        .py()
        .import("json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&s).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn rows4(m: &conical_core::SymForm4) -> Vec<Vec<f64>> {
    (0..4)
        .map(|i| (0..4).map(|j| m.get(i, j)).collect())
        .collect()
}

/// Exact conical metric with deficit parameter `alpha` in (0, 1].
#[pyclass(frozen)]
struct Metric {
    params: ConicalParams,
}

#[pymethods]
impl Metric {
    #[new]
    fn new(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            params: ConicalParams::new(alpha).map_err(err)?,
        })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.params.alpha()
    }

    #[getter]
    fn alpha_sq(&self) -> f64 {
        self.params.alpha_sq()
    }

    /// 4x4 components in Cartesian coordinates `(t, x, y, z)`.
    fn components(&self, t: f64, x: f64, y: f64, z: f64) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows4(
            &metric_cartesian(&SpacetimePoint::new(t, x, y, z), &self.params).map_err(err)?,
        ))
    }

    fn eigenvalues(&self, t: f64, x: f64, y: f64, z: f64) -> PyResult<Vec<f64>> {
        let g = metric_cartesian(&SpacetimePoint::new(t, x, y, z), &self.params).map_err(err)?;
        let mut ev = g.eigenvalues().to_vec();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    fn pullback_residual(&self, t: f64, r: f64, phi: f64, z: f64) -> PyResult<f64> {
        pullback_residual(t, r, phi, z, &self.params).map_err(err)
    }

    /// `rho(v, v) - alpha^2 (v1^2 + v2^2) - v3^2` at `(x, y, z)`.
    fn lower_bound_margin(&self, x: f64, y: f64, z: f64, v: [f64; 3]) -> PyResult<f64> {
        lower_bound_margin(x, y, z, &v, &self.params).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Metric(alpha={})", self.params.alpha())
    }
}

#[pyclass(frozen)]
struct Mollifier {
    inner: CoreMollifier,
}

#[pymethods]
impl Mollifier {
    #[staticmethod]
    fn gaussian() -> Self {
        Self {
            inner: CoreMollifier::gaussian(),
        }
    }

    #[staticmethod]
    fn bump() -> Self {
        Self {
            inner: CoreMollifier::bump(),
        }
    }

    #[staticmethod]
    fn moment_corrected(moments: usize) -> PyResult<Self> {
        Ok(Self {
            inner: CoreMollifier::moment_corrected(moments).map_err(err)?,
        })
    }

    #[staticmethod]
    fn strict_net() -> Self {
        Self {
            inner: CoreMollifier::strict_net(),
        }
    }

    #[getter]
    fn variant(&self) -> String {
        format!("{:?}", self.inner.variant())
    }

    /// Radial profile `phi_eps(s)`.
    fn profile(&self, eps: f64, s: f64) -> f64 {
        self.inner.profile(eps, s)
    }

    fn l1_norm(&self, eps: f64) -> f64 {
        self.inner.l1_norm(eps)
    }

    fn __repr__(&self) -> String {
        format!("Mollifier({:?})", self.inner.variant())
    }
}

/// Mollified net `g^eps` for a deficit parameter and mollifier.
#[pyclass(frozen)]
struct RegularizedField {
    inner: CoreField,
}

#[pymethods]
impl RegularizedField {
    #[new]
    fn new(alpha: f64, mollifier: &Mollifier) -> PyResult<Self> {
        let params = ConicalParams::new(alpha).map_err(err)?;
        Ok(Self {
            inner: CoreField::new(params, mollifier.inner.clone()),
        })
    }

    /// Admissibility record with `status` and, when admissible, `beta`.
    fn beta<'py>(&self, py: Python<'py>, eps: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.beta(eps))
    }

    /// Mollified `(f1, f2)` at `(x, y)`.
    fn regularize(&self, eps: f64, x: f64, y: f64) -> PyResult<(f64, f64)> {
        self.inner.regularize(eps, x, y).map_err(err)
    }

    fn mu_eps(&self, eps: f64, x: f64, y: f64) -> PyResult<f64> {
        self.inner.mu_eps(eps, x, y).map_err(err)
    }

    fn components(&self, eps: f64, t: f64, x: f64, y: f64, z: f64) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows4(
            &self
                .inner
                .metric(eps, &SpacetimePoint::new(t, x, y, z))
                .map_err(err)?,
        ))
    }

    #[pyo3(signature = (eps, samples = 10_000, seed = 0))]
    fn verify_lower_bound<'py>(
        &self,
        py: Python<'py>,
        eps: f64,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let spec = SampleSpec {
            samples,
            ..SampleSpec::default()
        };
        let rep = py
            .detach(|| self.inner.verify_lower_bound(eps, &spec, seed))
            .map_err(err)?;
        to_py(py, &rep)
    }
}

/// L1/L2 masses of the gradient of `f1` (or `f2`) on the annulus `r_inner < r < 1`.
#[pyfunction]
#[pyo3(signature = (r_inner, component = "f1"))]
fn sobolev_probe<'py>(
    py: Python<'py>,
    r_inner: f64,
    component: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let c = match component {
        "f1" => FieldComponent::F1,
        "f2" => FieldComponent::F2,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown component {other:?}"
            )))
        }
    };
    to_py(
        py,
        &probe(c, r_inner, &QuadratureSpec::default()).map_err(err)?,
    )
}

/// Grid refinement study against a standing mode of the flat wave equation.
#[pyfunction]
#[pyo3(signature = (sizes, half_width = 1.0, mode = (1, 2), t_final = 1.0))]
fn flat_convergence<'py>(
    py: Python<'py>,
    sizes: Vec<usize>,
    half_width: f64,
    mode: (u32, u32),
    t_final: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let rows = py
        .detach(|| wave::flat_convergence(&sizes, half_width, mode, t_final))
        .map_err(err)?;
    to_py(py, &rows)
}

/// Evolve initial data on `g^eps`; returns the final field and the energy trace.
#[pyfunction]
#[pyo3(signature = (field, eps, data, n = 128, half_width = 1.0, t_final = 0.5))]
fn wave_solve<'py>(
    py: Python<'py>,
    field: &RegularizedField,
    eps: f64,
    data: &Bound<'py, PyAny>,
    n: usize,
    half_width: f64,
    t_final: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let data: InitialData = from_py(data)?;
    let grid = Grid2D::new(n, half_width).map_err(err)?;
    let (st, dt) = py
        .detach(|| {
            let op = SpatialOperator::assemble(&field.inner, eps, &grid)?;
            let (_, dt) = wave::time_grid(t_final, op.max_dt(DEFAULT_CFL));
            Ok::<_, conical_core::Error>((wave::solve(&op, &data, t_final, dt, 1)?, dt))
        })
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("n", n)?;
    out.set_item("half_width", half_width)?;
    out.set_item("t", st.t())?;
    out.set_item("dt", dt)?;
    out.set_item("u", st.u().to_vec())?;
    out.set_item("energy", to_py(py, &st.trace())?)?;
    Ok(out)
}

/// Distances between successive eps solutions at `t_final`.
#[pyfunction]
#[pyo3(signature = (field, eps, data, n = 128, half_width = 1.0, t_final = 0.5))]
fn epsilon_study<'py>(
    py: Python<'py>,
    field: &RegularizedField,
    eps: Vec<f64>,
    data: &Bound<'py, PyAny>,
    n: usize,
    half_width: f64,
    t_final: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let data: InitialData = from_py(data)?;
    let grid = Grid2D::new(n, half_width).map_err(err)?;
    let study = py
        .detach(|| wave::epsilon_study(&field.inner, &eps, &grid, &data, t_final))
        .map_err(err)?;
    to_py(py, &study)
}

/// Slice-crossing report for a built-in family (`"oscillating"` or `"escaping"`).
#[pyfunction]
#[pyo3(signature = (family, field, eps, window = 1.0, nodes = 21, q_exponent = 1.0, compact_radius = None))]
#[allow(clippy::too_many_arguments)]
fn crossing<'py>(
    py: Python<'py>,
    family: &str,
    field: &RegularizedField,
    eps: Vec<f64>,
    window: f64,
    nodes: usize,
    q_exponent: f64,
    compact_radius: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let fam = match family {
        "oscillating" => oscillating_family(&eps, window, nodes),
        "escaping" => escaping_family(&eps, window, nodes),
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    }
    .map_err(err)?;
    let fam = match compact_radius {
        Some(r) => conical_core::causality::CurveFamily::new(fam.members().to_vec(), Some(r))
            .map_err(err)?,
        None => fam,
    };
    to_py(
        py,
        &generalized_crossing(&fam, &field.inner, q_exponent).map_err(err)?,
    )
}

#[pymodule]
fn conical(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Metric>()?;
    m.add_class::<Mollifier>()?;
    m.add_class::<RegularizedField>()?;
    m.add_function(wrap_pyfunction!(sobolev_probe, m)?)?;
    m.add_function(wrap_pyfunction!(flat_convergence, m)?)?;
    m.add_function(wrap_pyfunction!(wave_solve, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_study, m)?)?;
    m.add_function(wrap_pyfunction!(crossing, m)?)?;
    Ok(())
}
