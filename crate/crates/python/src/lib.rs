//! Python bindings. Elements, states and monomials cross the boundary as
//! their canonical text, reports as plain dicts.

#![allow(clippy::too_many_arguments)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use twzhu::suite::{describe_quotient, run_suite, Config, RawConfig};
use twzhu::text::{format_element, parse_element, parse_monomial};
use twzhu::ueva::{FiltrationCtx, Straightener};
use twzhu::zhu::{circ_product, quotient, star_product, SpanCutoffs, ZhuParams};
use twzhu::{scalars, Mode, VoaBackend};

fn err(e: twzhu::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode(text: &str) -> PyResult<Mode> {
    let x = scalars::parse_scalar(text).map_err(err)?;
    Mode::from_scalar(&x).map_err(err)
}

fn to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).expect("json");
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// A vertex operator algebra with its automorphism.
#[pyclass(name = "Backend", module = "twzhu_py", frozen)]
struct PyBackend {
    inner: VoaBackend,
}

#[pymethods]
impl PyBackend {
    /// Rank-one Heisenberg algebra with `a -> -a`.
    #[staticmethod]
    fn heisenberg() -> Self {
        PyBackend {
            inner: VoaBackend::heisenberg(),
        }
    }

    /// Virasoro vacuum algebra at central charge `c`, e.g. `"1/2"`.
    #[staticmethod]
    fn virasoro(c: &str) -> PyResult<Self> {
        Ok(PyBackend {
            inner: VoaBackend::virasoro(scalars::parse_scalar(c).map_err(err)?),
        })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    #[getter]
    fn order(&self) -> u32 {
        self.inner.order()
    }

    fn basis(&self, weight: i64) -> Vec<String> {
        self.inner
            .basis(weight)
            .into_iter()
            .map(|k| format_element(&self.inner, &twzhu::Element::basis(k)))
            .collect()
    }

    /// Canonical text of an element.
    fn canonical(&self, text: &str) -> PyResult<String> {
        let x = parse_element(&self.inner, text).map_err(err)?;
        Ok(format_element(&self.inner, &x))
    }

    /// `u_i v`.
    fn mode_product(&self, u: &str, i: i64, v: &str) -> PyResult<String> {
        let u = parse_element(&self.inner, u).map_err(err)?;
        let v = parse_element(&self.inner, v).map_err(err)?;
        Ok(format_element(
            &self.inner,
            &self.inner.mode_product(&u, i, &v),
        ))
    }

    /// `u *^n_{g,m,p} v`.
    #[pyo3(signature = (u, v, n = "0", m = "0", p = "0"))]
    fn star(&self, u: &str, v: &str, n: &str, m: &str, p: &str) -> PyResult<String> {
        let u = parse_element(&self.inner, u).map_err(err)?;
        let v = parse_element(&self.inner, v).map_err(err)?;
        let params =
            ZhuParams::new(mode(n)?, mode(m)?, mode(p)?, self.inner.order()).map_err(err)?;
        let out = star_product(&self.inner, &u, &v, &params).map_err(err)?;
        Ok(format_element(&self.inner, &out))
    }

    /// `u ∘^n_{g,m} v`.
    #[pyo3(signature = (u, v, n = "0", m = "0"))]
    fn circ(&self, u: &str, v: &str, n: &str, m: &str) -> PyResult<String> {
        let u = parse_element(&self.inner, u).map_err(err)?;
        let v = parse_element(&self.inner, v).map_err(err)?;
        let out = circ_product(&self.inner, &u, &v, mode(n)?, mode(m)?).map_err(err)?;
        Ok(format_element(&self.inner, &out))
    }

    /// Truncated quotient `V_{<=N} / O_{g,n,m}` with its tables.
    #[pyo3(signature = (n, m, cutoff_n, cutoff_g, cutoff_p, slack = 0))]
    fn quotient(
        &self,
        py: Python<'_>,
        n: &str,
        m: &str,
        cutoff_n: i64,
        cutoff_g: i64,
        cutoff_p: &str,
        slack: i64,
    ) -> PyResult<Py<PyAny>> {
        let cut = SpanCutoffs::new(cutoff_n, cutoff_g, mode(cutoff_p)?).with_slack(slack);
        let q = quotient(&self.inner, mode(n)?, mode(m)?, cut).map_err(err)?;
        to_py(py, &describe_quotient(&self.inner, &q))
    }

    /// Straightens a monomial of degree `n - m`; returns `u` with
    /// `J_{m-n}(u)` congruent to it.
    fn straighten(&self, monomial: &str, n: &str, m: &str) -> PyResult<String> {
        let x = parse_monomial(&self.inner, monomial).map_err(err)?;
        let ctx = FiltrationCtx::new(mode(n)?, mode(m)?, self.inner.order()).map_err(err)?;
        let u = Straightener::new(&self.inner, ctx, 1_000_000)
            .poly(&x)
            .map_err(err)?;
        Ok(format_element(&self.inner, &u))
    }

    fn __repr__(&self) -> String {
        format!("Backend({})", self.inner.name())
    }
}

/// Runs the suites described by a TOML config and returns the report.
#[pyfunction]
fn run_report(py: Python<'_>, config: &str) -> PyResult<Py<PyAny>> {
    let raw = RawConfig::from_toml(config).map_err(err)?;
    let cfg = Config::from_raw(&raw).map_err(err)?;
    let report = run_suite(&cfg).map_err(err)?;
    to_py(py, &serde_json::to_value(&report).expect("json"))
}

#[pymodule]
fn twzhu_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBackend>()?;
    m.add_function(wrap_pyfunction!(run_report, m)?)?;
    m.add("SCHEMA", twzhu::suite::SCHEMA)?;
    Ok(())
}
