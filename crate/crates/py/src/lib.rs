//! Python bindings for the cscx toolkit.
//!
//! Structured results cross the boundary as plain dicts and lists, built from
//! the same JSON the command-line tool emits.

use std::str::FromStr;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use cscx_core::cohomology::{self, CohomologyOptions};
use cscx_core::contact::{self, levi_form};
use cscx_core::descent;
use cscx_core::grading::{modes_with_entries, sample_modes, Truncation};
use cscx_core::lefschetz::{self, SymplecticFiber};
use cscx_core::operator::RankMethod;
use cscx_core::{rumin, Coefficient, DifferentialForm, Rational, Ring};

create_exception!(cscx, CscxError, PyException, "Raised when a computation or a consistency check fails.");

fn err(e: cscx_core::Error) -> PyErr {
    CscxError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn rational(s: &str) -> PyResult<Rational> {
    Rational::from_str(s.trim()).map_err(|e| PyValueError::new_err(format!("{s:?}: {e}")))
}

/// A differential form with polynomial or trigonometric coefficients.
#[pyclass(name = "Form", module = "cscx", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct Form(DifferentialForm);

#[pymethods]
impl Form {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Form).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Constant k-form `dx_{i1} ∧ … ∧ dx_{ik}` on `nvars` coordinates.
    #[staticmethod]
    #[pyo3(signature = (nvars, axes, ring = "poly"))]
    fn basis(nvars: usize, axes: Vec<usize>, ring: &str) -> PyResult<Self> {
        let ring = parse_ring(ring)?;
        let mut f = DifferentialForm::scalar(Coefficient::one(ring, nvars));
        for a in axes {
            f = f.wedge(&DifferentialForm::dx(nvars, ring, a).map_err(err)?).map_err(err)?;
        }
        Ok(Form(f))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.0.nvars()
    }

    #[getter]
    fn ring(&self) -> String {
        self.0.ring().to_string()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn d(&self) -> Self {
        Form(self.0.exterior_derivative())
    }

    fn wedge(&self, other: &Form) -> PyResult<Self> {
        self.0.wedge(&other.0).map(Form).map_err(err)
    }

    fn __add__(&self, other: &Form) -> PyResult<Self> {
        self.0.try_add(&other.0).map(Form).map_err(err)
    }

    /// Multiply by a rational given as a string such as `"-3/2"`.
    fn scale(&self, factor: &str) -> PyResult<Self> {
        Ok(Form(self.0.scale(&rational(factor)?)))
    }

    fn __repr__(&self) -> String {
        format!("Form(degree={}, nvars={}, terms={})", self.0.degree(), self.0.nvars(), self.0.terms().len())
    }
}

fn parse_ring(s: &str) -> PyResult<Ring> {
    match s {
        "poly" => Ok(Ring::Poly),
        "trig" => Ok(Ring::Trig),
        _ => Err(PyValueError::new_err(format!("unknown ring {s:?}"))),
    }
}

/// Contact chart `α = dt + β` on R^{2n+1}.
#[pyclass(name = "ContactChart", module = "cscx", frozen)]
pub struct ContactChart(contact::ContactChart);

#[pymethods]
impl ContactChart {
    #[staticmethod]
    fn standard(n: usize) -> PyResult<Self> {
        contact::ContactChart::standard(n).map(ContactChart).map_err(err)
    }

    /// Build from a potential β on R^{2n}; raises if dβ is degenerate.
    #[staticmethod]
    fn from_beta(n: usize, beta: &Form) -> PyResult<Self> {
        contact::contactify(n, &beta.0, beta.0.ring()).map(ContactChart).map_err(err)
    }

    fn with_xi_scale(&self, lam: &str) -> PyResult<Self> {
        self.0.with_xi_scale(rational(lam)?).map(ContactChart).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn xi_scale(&self) -> String {
        self.0.xi_scale().to_string()
    }

    fn alpha(&self) -> Form {
        Form(self.0.alpha().clone())
    }

    fn levi_is_constant(&self) -> PyResult<bool> {
        Ok(levi_form(&self.0).map_err(err)?.constant().is_some())
    }

    fn __repr__(&self) -> String {
        format!("ContactChart(n={}, ring={})", self.0.n(), self.0.ring())
    }
}

/// Conformally symplectic chart: affine R^{2n} or the flat torus T^{2n}.
#[pyclass(name = "CsChart", module = "cscx", frozen)]
pub struct CsChart(lefschetz::CsChart);

#[pymethods]
impl CsChart {
    #[staticmethod]
    fn affine(n: usize) -> PyResult<Self> {
        lefschetz::CsChart::affine(n).map(CsChart).map_err(err)
    }

    #[staticmethod]
    fn affine_with_beta(n: usize, beta: &Form) -> PyResult<Self> {
        lefschetz::CsChart::affine_with_beta(n, beta.0.clone()).map(CsChart).map_err(err)
    }

    #[staticmethod]
    fn torus(n: usize) -> PyResult<Self> {
        lefschetz::CsChart::torus(n).map(CsChart).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn model(&self) -> &'static str {
        match self.0.ring() {
            Ring::Poly => "affine",
            Ring::Trig => "torus",
        }
    }

    fn omega(&self) -> Form {
        Form(self.0.omega().clone())
    }

    fn __repr__(&self) -> String {
        format!("CsChart(model={}, n={})", self.model(), self.0.n())
    }
}

fn truncation(
    chart: &lefschetz::CsChart,
    max_weight: Option<u32>,
    modes: Option<Vec<i64>>,
    sampled: Option<usize>,
    seed: u64,
) -> PyResult<Truncation> {
    match chart.ring() {
        Ring::Poly => {
            if modes.is_some() || sampled.is_some() {
                return Err(PyValueError::new_err("mode options apply to the torus model only"));
            }
            Ok(Truncation::weight(max_weight.unwrap_or(8)))
        }
        Ring::Trig => {
            if max_weight.is_some() {
                return Err(PyValueError::new_err("max_weight applies to the affine model only"));
            }
            let dim = chart.nvars();
            let mut all = modes_with_entries(dim, &modes.unwrap_or_else(|| vec![0]));
            if let Some(count) = sampled {
                all.extend(sample_modes(dim, count, seed).map_err(err)?);
            }
            Ok(Truncation::modes(all))
        }
    }
}

/// Rows of the Lefschetz table of the standard symplectic form on R^{2n}.
#[pyfunction]
fn lefschetz_table(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &lefschetz::lefschetz_table(&SymplecticFiber::standard(n)))
}

#[pyfunction]
fn primitive_dim(n: usize, j: usize) -> usize {
    lefschetz::primitive_dim(n, j)
}

/// Check the Rumin complex of the standard chart up to a weight bound.
#[pyfunction]
#[pyo3(signature = (n, max_weight = 6, modular_rank = false))]
fn rumin_verify(py: Python<'_>, n: usize, max_weight: u32, modular_rank: bool) -> PyResult<Bound<'_, PyAny>> {
    let chart = contact::ContactChart::standard(n).map_err(err)?;
    let method = if modular_rank { RankMethod::Modular } else { RankMethod::FractionFree };
    let v = py
        .detach(|| rumin::verify_rumin(&chart, &Truncation::weight(max_weight), method))
        .map_err(err)?;
    let out = to_py(py, &v)?;
    out.set_item("passed", v.passed())?;
    Ok(out)
}

/// Compare the descended, direct and spectral-sequence constructions of the RS operators.
#[pyfunction]
#[pyo3(signature = (n, max_weight = 5))]
fn crosscheck(py: Python<'_>, n: usize, max_weight: u32) -> PyResult<Bound<'_, PyAny>> {
    let c = py
        .detach(|| {
            let contact = contact::ContactChart::standard(n)?;
            let cs = lefschetz::CsChart::affine(n)?;
            descent::crosscheck(&contact, &cs, &Truncation::weight(max_weight))
        })
        .map_err(err)?;
    let out = to_py(py, &c)?;
    out.set_item("passed", c.passed())?;
    Ok(out)
}

/// Shapes and sizes of the RS operators D_0 … D_2n.
#[pyfunction]
#[pyo3(signature = (chart, max_weight = None, modes = None, sample_modes = None, seed = 0x5eed))]
fn rs_operators<'py>(
    py: Python<'py>,
    chart: &CsChart,
    max_weight: Option<u32>,
    modes: Option<Vec<i64>>,
    sample_modes: Option<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let tr = truncation(&chart.0, max_weight, modes, sample_modes, seed)?;
    let ops = py.detach(|| descent::rs_complex(&chart.0, &tr)).map_err(err)?;
    let rows: Vec<_> = ops
        .iter()
        .map(|m| serde_json::json!({ "name": m.name(), "shape": [m.rows().len(), m.cols().len()], "nnz": m.nnz() }))
        .collect();
    to_py(py, &rows)
}

/// Full cohomology report: de Rham, twisted and RS dimensions with every consistency check.
#[pyfunction]
#[pyo3(signature = (chart, max_weight = None, modes = None, sample_modes = None, seed = 0x5eed, stability = true))]
fn rs_cohomology<'py>(
    py: Python<'py>,
    chart: &CsChart,
    max_weight: Option<u32>,
    modes: Option<Vec<i64>>,
    sample_modes: Option<usize>,
    seed: u64,
    stability: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let tr = truncation(&chart.0, max_weight, modes, sample_modes, seed)?;
    let opts = CohomologyOptions { rank: RankMethod::FractionFree, check_stability: stability };
    let report = py.detach(|| cohomology::rs_cohomology(&chart.0, &tr, opts)).map_err(err)?;
    let out = to_py(py, &report)?;
    out.set_item("passed", report.passed())?;
    Ok(out)
}

/// Long exact sequence of the total complex, with the connecting-map ranks.
#[pyfunction]
#[pyo3(signature = (chart, max_weight = None, modes = None, sample_modes = None, seed = 0x5eed))]
fn les<'py>(
    py: Python<'py>,
    chart: &CsChart,
    max_weight: Option<u32>,
    modes: Option<Vec<i64>>,
    sample_modes: Option<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let tr = truncation(&chart.0, max_weight, modes, sample_modes, seed)?;
    let report = py.detach(|| cohomology::les_check(&chart.0, &tr)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn cscx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CscxError", m.py().get_type::<CscxError>())?;
    m.add_class::<Form>()?;
    m.add_class::<ContactChart>()?;
    m.add_class::<CsChart>()?;
    m.add_function(wrap_pyfunction!(lefschetz_table, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_dim, m)?)?;
    m.add_function(wrap_pyfunction!(rumin_verify, m)?)?;
    m.add_function(wrap_pyfunction!(crosscheck, m)?)?;
    m.add_function(wrap_pyfunction!(rs_operators, m)?)?;
    m.add_function(wrap_pyfunction!(rs_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(les, m)?)?;
    Ok(())
}
