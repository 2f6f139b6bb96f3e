//! Python bindings. Structured results come back as plain dicts and lists.

use balanced_gaps::balanced::{self, StarSetSpec};
use balanced_gaps::density::{self, MonteCarloOptions};
use balanced_gaps::equidist::{self, DiscrepancyConfig, WeightFn};
use balanced_gaps::tuples::{self, AdmissibleTuple, GpyConstantsQuery};
use balanced_gaps::weights::{self, MomentOptions, WeightConfig};
use balanced_gaps::{build_factor_table, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match e {
        Error::Budget(_) | Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(value_to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, value_to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let json = serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    value_to_py(py, &json)
}

fn tuple_of(offsets: Vec<u64>) -> PyResult<AdmissibleTuple> {
    AdmissibleTuple::new(offsets).map_err(err)
}

/// Windowed smallest-prime-factor table over `[lo, hi)`.
#[pyclass(name = "FactorTable", frozen)]
struct PyFactorTable {
    inner: balanced_gaps::FactorTable,
}

#[pymethods]
impl PyFactorTable {
    #[new]
    fn new(lo: u64, hi: u64) -> PyResult<Self> {
        Ok(PyFactorTable { inner: build_factor_table(lo, hi).map_err(err)? })
    }

    #[getter]
    fn lo(&self) -> u64 {
        self.inner.lo()
    }

    #[getter]
    fn hi(&self) -> u64 {
        self.inner.hi()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `[(p, e), ...]` in increasing `p`.
    fn factorize(&self, n: u64) -> PyResult<Vec<(u64, u32)>> {
        Ok(self.inner.factorize(n).map_err(err)?.factors().to_vec())
    }

    fn is_prime(&self, n: u64) -> PyResult<bool> {
        self.inner.is_prime(n).map_err(err)
    }

    fn classify<'py>(&self, py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
        let f = self.inner.factorize(n).map_err(err)?;
        to_py(py, &balanced::classify(&f).map_err(err)?)
    }

    fn is_eps_balanced(&self, n: u64, eps: f64) -> PyResult<bool> {
        let f = self.inner.factorize(n).map_err(err)?;
        balanced::is_eps_balanced(&f, eps).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("FactorTable({}, {})", self.inner.lo(), self.inner.hi())
    }
}

fn single(n: u64) -> PyResult<balanced_gaps::Factorization> {
    let hi = n.checked_add(1).ok_or_else(|| PyValueError::new_err("n too large"))?;
    build_factor_table(n, hi).and_then(|t| t.factorize(n)).map_err(err)
}

/// Ω, balance threshold and primality of `n ≥ 2`.
#[pyfunction]
fn classify<'py>(py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &balanced::classify(&single(n)?).map_err(err)?)
}

#[pyfunction]
fn is_eps_balanced(n: u64, eps: f64) -> PyResult<bool> {
    balanced::is_eps_balanced(&single(n)?, eps).map_err(err)
}

/// Exact star-set count over `[N, 2N)` with its prediction.
#[pyfunction]
fn count_star<'py>(py: Python<'py>, n_base: u64, r: u32, eps: f64) -> PyResult<Bound<'py, PyAny>> {
    let spec = StarSetSpec::new(n_base, r, eps).map_err(err)?;
    let c = py
        .detach(|| balanced::count_star_streaming(&spec, balanced_gaps::sieve::DEFAULT_SEGMENT_LEN as u64))
        .map_err(err)?;
    to_py(py, &c)
}

/// `C₀(r, ε)`; `method` is one of `closed_form`, `quadrature`,
/// `monte_carlo`, or `None` for the default route.
#[pyfunction]
#[pyo3(signature = (r, eps, method=None, samples=None, seed=None))]
fn c0<'py>(
    py: Python<'py>,
    r: u32,
    eps: f64,
    method: Option<&str>,
    samples: Option<u64>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let defaults = MonteCarloOptions::default();
    let mc = MonteCarloOptions { samples: samples.unwrap_or(defaults.samples), seed: seed.unwrap_or(defaults.seed) };
    let d = py
        .detach(|| match method {
            None => density::c0(r, eps),
            Some("closed_form") if r == 2 => density::c0(2, eps),
            Some("quadrature") => density::c0_quadrature(r, eps),
            Some("monte_carlo") => density::c0_monte_carlo(r, eps, mc),
            Some(other) => Err(Error::InvalidParameter {
                name: "method",
                reason: format!("unsupported method `{other}` for r = {r}"),
            }),
        })
        .map_err(err)?;
    to_py(py, &d)
}

#[pyfunction]
fn c0_upper_bound(r: u32, eps: f64) -> f64 {
    density::c0_upper_bound(r, eps)
}

#[pyfunction]
#[pyo3(signature = (eps, r_max=8, samples=None, seed=None))]
fn c0_tail_sum<'py>(
    py: Python<'py>,
    eps: f64,
    r_max: u32,
    samples: Option<u64>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let defaults = MonteCarloOptions::default();
    let mc = MonteCarloOptions { samples: samples.unwrap_or(defaults.samples), seed: seed.unwrap_or(defaults.seed) };
    to_py(py, &py.detach(|| density::c0_tail_sum(eps, r_max, mc)).map_err(err)?)
}

#[pyfunction]
fn is_admissible(offsets: Vec<u64>) -> PyResult<bool> {
    Ok(tuples::is_admissible(&tuple_of(offsets)?))
}

#[pyfunction]
fn generate_tuple(k: usize) -> PyResult<Vec<u64>> {
    Ok(tuples::generate_tuple(k).map_err(err)?.offsets().to_vec())
}

/// `(value, p_max, tail_log_bound)`.
#[pyfunction]
#[pyo3(signature = (offsets, p_max=1_000_000))]
fn singular_series(py: Python<'_>, offsets: Vec<u64>, p_max: u64) -> PyResult<(f64, u64, f64)> {
    let h = tuple_of(offsets)?;
    let s = py.detach(|| tuples::singular_series(&h, p_max)).map_err(err)?;
    Ok((s.value, s.p_max, s.tail_log_bound))
}

#[pyfunction]
#[pyo3(signature = (theta=None, delta=None))]
fn gpy_constants<'py>(py: Python<'py>, theta: Option<f64>, delta: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let q = match (theta, delta) {
        (Some(t), None) => GpyConstantsQuery::from_theta(t),
        (None, Some(d)) => GpyConstantsQuery::from_delta(d),
        _ => return Err(PyValueError::new_err("pass exactly one of theta, delta")),
    }
    .map_err(err)?;
    to_py(py, &tuples::gpy_constants(q).map_err(err)?)
}

#[pyfunction]
fn positivity_factor(k: u64, l: u64, c0: f64) -> f64 {
    tuples::positivity_factor(k, l, c0)
}

#[pyfunction]
#[pyo3(signature = (r, eps, k_cap=1000))]
fn min_k_for_two<'py>(py: Python<'py>, r: u32, eps: f64, k_cap: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &tuples::min_k_for_two(r, eps, k_cap).map_err(err)?)
}

/// Λ_R(n; H, l) for `n` in `[lo, hi)`.
#[pyfunction]
fn lambda_r(py: Python<'_>, lo: u64, hi: u64, offsets: Vec<u64>, l: u32, big_r: f64) -> PyResult<Vec<f64>> {
    let cfg = WeightConfig::new(tuple_of(offsets)?, l, big_r).map_err(err)?;
    py.detach(|| weights::lambda_r_batch(lo, hi, &cfg)).map_err(err)
}

/// One of the weighted moments over `[N, 2N)`: `variant` is `lemma1`,
/// `lemma2` (needs `h`), `lemma3` (needs `h`, `r`, `eps`) or `s_statistic`
/// (needs `r`, `eps`). `big_r` defaults to `N^{1/4}`.
#[pyfunction]
#[pyo3(signature = (variant, n_base, offsets, l, big_r=None, h=None, r=None, eps=None))]
#[allow(clippy::too_many_arguments)]
fn moment<'py>(
    py: Python<'py>,
    variant: &str,
    n_base: u64,
    offsets: Vec<u64>,
    l: u32,
    big_r: Option<f64>,
    h: Option<u64>,
    r: Option<u32>,
    eps: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = WeightConfig::new(tuple_of(offsets)?, l, big_r.unwrap_or((n_base as f64).powf(0.25))).map_err(err)?;
    let opts = MomentOptions::default();
    let need_h = || h.ok_or_else(|| PyValueError::new_err("this variant needs h"));
    let spec = || match (r, eps) {
        (Some(r), Some(e)) => StarSetSpec::new(n_base, r, e).map_err(err),
        _ => Err(PyValueError::new_err("this variant needs r and eps")),
    };
    let rep = match variant {
        "lemma1" => py.detach(|| weights::moment_lemma1(n_base, &cfg, &opts)),
        "lemma2" => {
            let h = need_h()?;
            py.detach(|| weights::moment_lemma2(n_base, &cfg, h, &opts))
        }
        "lemma3" => {
            let (h, s) = (need_h()?, spec()?);
            py.detach(|| weights::moment_lemma3(n_base, &cfg, h, &s, &opts))
        }
        "s_statistic" => {
            let s = spec()?;
            py.detach(|| weights::s_statistic(n_base, &cfg, &s, &opts))
        }
        other => return Err(PyValueError::new_err(format!("unknown variant `{other}`"))),
    }
    .map_err(err)?;
    to_py(py, &rep)
}

/// Discrepancy of the primes `p ≤ N` in progressions to moduli `q ≤ q_max`.
#[pyfunction]
fn bv_prime_discrepancy<'py>(py: Python<'py>, n: u64, q_max: u64) -> PyResult<Bound<'py, PyAny>> {
    let cfg = DiscrepancyConfig::primes(n, q_max).map_err(err)?;
    let rep = py
        .detach(|| build_factor_table(2, n + 1).and_then(|t| equidist::bv_prime_discrepancy(&cfg, &t)))
        .map_err(err)?;
    to_py(py, &rep)
}

#[pyfunction]
fn bv_star_discrepancy<'py>(py: Python<'py>, n_base: u64, r: u32, eps: f64, q_max: u64) -> PyResult<Bound<'py, PyAny>> {
    let spec = StarSetSpec::new(n_base, r, eps).map_err(err)?;
    let cfg = DiscrepancyConfig::star(spec, q_max).map_err(err)?;
    let (lo, hi) = spec.window();
    let rep = py
        .detach(|| build_factor_table(lo, hi).and_then(|t| equidist::bv_star_discrepancy(&cfg, &t)))
        .map_err(err)?;
    to_py(py, &rep)
}

/// `f` is `"const1"`, `"mobius"` or a list of `(m, f(m))` pairs.
#[pyfunction]
fn weighted_discrepancy<'py>(
    py: Python<'py>,
    n: u64,
    q_max: u64,
    alpha: f64,
    f: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let wf = if let Ok(name) = f.extract::<String>() {
        match name.as_str() {
            "const1" => WeightFn::Const1,
            "mobius" => WeightFn::Mobius,
            other => return Err(PyValueError::new_err(format!("unknown weight `{other}`"))),
        }
    } else {
        WeightFn::Table(f.extract::<Vec<(u64, f64)>>()?)
    };
    let cfg = DiscrepancyConfig::primes(n, q_max).map_err(err)?;
    to_py(py, &py.detach(|| equidist::weighted_discrepancy(&cfg, alpha, &wf)).map_err(err)?)
}

/// `∫₂ˣ dt / ln t` for `x ≥ 2`.
#[pyfunction]
fn log_integral(x: f64) -> PyResult<f64> {
    balanced_gaps::log_integral(x).map_err(err)
}

#[pymodule(name = "balanced_gaps")]
fn balanced_gaps_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyFactorTable>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(is_eps_balanced, m)?)?;
    m.add_function(wrap_pyfunction!(count_star, m)?)?;
    m.add_function(wrap_pyfunction!(c0, m)?)?;
    m.add_function(wrap_pyfunction!(c0_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(c0_tail_sum, m)?)?;
    m.add_function(wrap_pyfunction!(is_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(generate_tuple, m)?)?;
    m.add_function(wrap_pyfunction!(singular_series, m)?)?;
    m.add_function(wrap_pyfunction!(gpy_constants, m)?)?;
    m.add_function(wrap_pyfunction!(positivity_factor, m)?)?;
    m.add_function(wrap_pyfunction!(min_k_for_two, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_r, m)?)?;
    m.add_function(wrap_pyfunction!(moment, m)?)?;
    m.add_function(wrap_pyfunction!(bv_prime_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(bv_star_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(log_integral, m)?)?;
    Ok(())
}
