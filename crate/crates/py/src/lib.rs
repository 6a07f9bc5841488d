//! Python bindings: generate realizations, estimate their characteristics,
//! compare with analytic mean values.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde_json::Value;
use tessera::characteristics::{
    estimate_lambda as lambda_inversion, oracle_johnson_mehl_mu, poisson_voronoi_mu, sample_pdt_typical_cell,
    segment_decomposition, EstimateOptions, Family, Report,
};
use tessera::geom::{CentroidRule, Vec2};
use tessera::io::{export_json, import_json, render_svg, ColorBy, Meta};
use tessera::models::{monte_carlo_sweep, ModelSpec, Realization as Inner};
use tessera::process::{MarkDistribution, Seed};
use tessera::tess::Tessellation;

fn err(e: tessera::Error) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

/// JSON value from a string or any object `json.dumps` accepts.
fn json_arg(py: Python<'_>, obj: Option<&Bound<'_, PyAny>>) -> PyResult<Value> {
    let Some(obj) = obj else { return Ok(Value::Null) };
    let text: String = if let Ok(s) = obj.cast::<PyString>() {
        s.to_str()?.to_owned()
    } else {
        py.import("json")?.call_method1("dumps", (obj,))?.extract()?
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn centroid(name: &str) -> PyResult<CentroidRule> {
    match name {
        "gravity" => Ok(CentroidRule::GravityCenter),
        "circumball" => Ok(CentroidRule::CircumballCenter),
        _ => Err(PyValueError::new_err(format!("unknown centroid rule {name:?}"))),
    }
}

/// One simulated tessellation (polygonal, polyhedral or raster).
#[pyclass(name = "Realization", module = "tessera", frozen)]
struct PyRealization {
    inner: Inner,
    meta: Meta,
}

#[pymethods]
impl PyRealization {
    #[getter]
    fn model(&self) -> String {
        match &self.inner {
            Inner::Tessellation(t) => t.model().to_string(),
            Inner::Raster(r) => r.model.clone(),
            Inner::Leaves(d) => d.raster.model.clone(),
        }
    }

    #[getter]
    fn dim(&self) -> usize {
        match &self.inner {
            Inner::Tessellation(t) => t.dim(),
            _ => 2,
        }
    }

    fn __len__(&self) -> usize {
        match &self.inner {
            Inner::Tessellation(t) => t.len(),
            Inner::Raster(r) => r.stats().n_cells(),
            Inner::Leaves(d) => d.raster.stats().n_cells(),
        }
    }

    /// Estimated characteristics as a dict.
    #[pyo3(signature = (centroid_rule = "gravity", interior_fraction = 0.8))]
    fn report(&self, centroid_rule: &str, interior_fraction: f64) -> PyResult<BTreeMap<String, f64>> {
        let opts = EstimateOptions { centroid: centroid(centroid_rule)?, interior_fraction };
        Ok(self.inner.report(&opts).map_err(err)?.values)
    }

    /// Cell corner lists of a planar polygonal realization.
    fn cells(&self) -> PyResult<Vec<Vec<(f64, f64)>>> {
        let t = self.inner.planar().ok_or_else(|| PyValueError::new_err("not a planar polygonal tessellation"))?;
        Ok(t.cells.iter().map(|c| c.vertices().iter().map(|v| (v.x, v.y)).collect()).collect())
    }

    /// Index of the planar cell containing `(x, y)`.
    fn zero_cell(&self, x: f64, y: f64) -> PyResult<Option<usize>> {
        let t = self.inner.planar().ok_or_else(|| PyValueError::new_err("not a planar polygonal tessellation"))?;
        Ok(t.zero_cell(Vec2 { x, y }))
    }

    /// K, J, I segment counts and the pi-vertex proportion.
    fn segments(&self) -> PyResult<BTreeMap<String, f64>> {
        let t = self.inner.planar().ok_or_else(|| PyValueError::new_err("not a planar polygonal tessellation"))?;
        let s = segment_decomposition(t);
        Ok(BTreeMap::from([("K".into(), s.k as f64), ("J".into(), s.j as f64), ("I".into(), s.i as f64), ("phi".into(), s.phi)]))
    }

    #[getter]
    fn diagnostics(&self) -> BTreeMap<String, f64> {
        match &self.inner {
            Inner::Tessellation(Tessellation::Planar(t)) => t.diagnostics.clone(),
            Inner::Tessellation(Tessellation::Spatial(t)) => t.diagnostics.clone(),
            Inner::Leaves(d) => BTreeMap::from([("drawn".into(), d.drawn as f64), ("visible".into(), d.leaves.len() as f64)]),
            Inner::Raster(_) => BTreeMap::new(),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        export_json(&self.inner, &self.meta).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (inner, meta) = import_json(text).map_err(err)?;
        Ok(Self { inner, meta })
    }

    #[pyo3(signature = (color_by = "cell"))]
    fn svg(&self, color_by: &str) -> PyResult<String> {
        let c: ColorBy = color_by.parse().map_err(err)?;
        render_svg(&self.inner, c).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Realization(model={:?}, cells={})", self.model(), self.__len__())
    }
}

/// Simulate one realization of `model` with parameters given as a dict or JSON string.
#[pyfunction]
#[pyo3(signature = (model, params = None, seed = 0))]
fn generate(py: Python<'_>, model: &str, params: Option<&Bound<'_, PyAny>>, seed: u64) -> PyResult<PyRealization> {
    let spec = ModelSpec::from_parts(model, json_arg(py, params)?).map_err(err)?;
    let inner = py.detach(|| spec.generate(Seed::new(seed))).map_err(err)?;
    let params = serde_json::to_value(&spec).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(PyRealization { inner, meta: Meta { params, seed: Some(seed) } })
}

/// Analytic mean values of a model, or `None` when unknown.
#[pyfunction]
#[pyo3(signature = (model, params = None))]
fn oracle(py: Python<'_>, model: &str, params: Option<&Bound<'_, PyAny>>) -> PyResult<Option<BTreeMap<String, f64>>> {
    let spec = ModelSpec::from_parts(model, json_arg(py, params)?).map_err(err)?;
    Ok(spec.oracle().map_err(err)?.map(|o| o.values))
}

/// Monte-Carlo sweep: rows `(name, estimate, se, oracle, z)`.
#[pyfunction]
#[pyo3(signature = (model, params = None, reps = 100, seed = 0))]
#[allow(clippy::type_complexity)]
fn validate(
    py: Python<'_>,
    model: &str,
    params: Option<&Bound<'_, PyAny>>,
    reps: usize,
    seed: u64,
) -> PyResult<Vec<(String, f64, f64, Option<f64>, Option<f64>)>> {
    let spec = ModelSpec::from_parts(model, json_arg(py, params)?).map_err(err)?;
    let table = py.detach(|| monte_carlo_sweep(&spec, reps, Seed::new(seed), &EstimateOptions::default())).map_err(err)?;
    Ok(table.rows.into_iter().map(|r| (r.name, r.estimate, r.se, r.oracle, r.z)).collect())
}

/// Intensity recovered from estimated mean values: `(estimate, per_formula, spread)`.
#[pyfunction]
fn estimate_lambda(report: BTreeMap<String, f64>, family: &str) -> PyResult<(f64, BTreeMap<String, f64>, f64)> {
    let fam: Family = family.parse().map_err(err)?;
    let r = Report { dim: if fam == Family::Pv3 { 3 } else { 2 }, replicates: 1, values: report, ..Default::default() };
    let e = lambda_inversion(&r, fam).map_err(err)?;
    Ok((e.estimate, e.per_formula, e.spread))
}

/// `n` direct samples of the Poisson-Delaunay typical triangle.
#[pyfunction]
#[pyo3(signature = (lam, n = 1, seed = 0))]
fn pdt_typical_cells(lam: f64, n: usize, seed: u64) -> PyResult<Vec<Vec<(f64, f64)>>> {
    let mut rng = Seed::new(seed).rng(0, "typical-cell");
    (0..n)
        .map(|_| {
            let c = sample_pdt_typical_cell(lam, &mut rng).map_err(err)?;
            Ok(c.vertices().iter().map(|v| (v.x, v.y)).collect())
        })
        .collect()
}

/// Density of k-faces' content in a Poisson-Voronoi tessellation.
#[pyfunction]
fn voronoi_mu(lam: f64, d: usize, k: usize) -> f64 {
    poisson_voronoi_mu(lam, d, k)
}

/// Johnson-Mehl k-face content density for birth-time distribution `q` (dict or JSON).
#[pyfunction]
fn johnson_mehl_mu(py: Python<'_>, lam: f64, q: &Bound<'_, PyAny>, d: usize, k: usize) -> PyResult<f64> {
    let q: MarkDistribution = serde_json::from_value(json_arg(py, Some(q))?).map_err(|e| PyValueError::new_err(e.to_string()))?;
    oracle_johnson_mehl_mu(lam, &q, d, k).map_err(err)
}

#[pymodule]
#[pyo3(name = "tessera")]
fn tessera_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRealization>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(pdt_typical_cells, m)?)?;
    m.add_function(wrap_pyfunction!(voronoi_mu, m)?)?;
    m.add_function(wrap_pyfunction!(johnson_mehl_mu, m)?)?;
    Ok(())
}
