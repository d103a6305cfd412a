//! Python bindings: the factor sieve, a few averaging and equidistribution
//! routines, the bracket-polynomial evaluator and the experiment runner.

use std::collections::BTreeMap;
use std::sync::Arc;

use ergolab::arith::FactorSieve;
use ergolab::gp::{eval_gp, parse_gp, GPExpr};
use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: ergolab::Error) -> PyErr {
    match e {
        ergolab::Error::ResourceExhausted { .. } => PyMemoryError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Smallest-prime-factor table up to `limit`.
#[pyclass(name = "Sieve", frozen)]
struct PySieve(Arc<FactorSieve>);

#[pymethods]
impl PySieve {
    #[new]
    fn new(limit: u64) -> PyResult<Self> {
        Ok(Self(Arc::new(FactorSieve::new(limit).map_err(py_err)?)))
    }

    #[getter]
    fn limit(&self) -> u64 {
        self.0.limit()
    }

    fn is_prime(&self, n: u64) -> PyResult<bool> {
        self.0.is_prime(n).map_err(py_err)
    }

    fn big_omega(&self, n: u64) -> PyResult<u32> {
        self.0.big_omega(n).map_err(py_err)
    }

    fn small_omega(&self, n: u64) -> PyResult<u32> {
        self.0.small_omega(n).map_err(py_err)
    }

    fn liouville(&self, n: u64) -> PyResult<i8> {
        self.0.liouville(n).map_err(py_err)
    }

    fn moebius(&self, n: u64) -> PyResult<i8> {
        self.0.moebius(n).map_err(py_err)
    }

    /// Prime factors of n with multiplicity, in increasing order.
    fn factor(&self, n: u64) -> PyResult<Vec<u64>> {
        let mut out = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.0.spf(m).map_err(py_err)?;
            out.push(p);
            m /= p;
        }
        Ok(out)
    }

    /// Ω(1), ..., Ω(n).
    fn big_omega_range(&self, n: u64) -> PyResult<Vec<u32>> {
        if n > self.0.limit() {
            return Err(PyValueError::new_err(format!("{n} exceeds the sieve limit {}", self.0.limit())));
        }
        Ok((1..=n).map(|k| self.0.big_omega_unchecked(k)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Sieve(limit={})", self.0.limit())
    }
}

/// A parsed bracket polynomial in the variable n.
#[pyclass(name = "GeneralizedPolynomial", frozen)]
struct PyGp(GPExpr);

#[pymethods]
impl PyGp {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_gp(text).map(Self).map_err(py_err)
    }

    fn __call__(&self, n: u64) -> f64 {
        eval_gp(&self.0, n)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyfunction]
fn coprimality_measure(b: Vec<u64>) -> PyResult<f64> {
    ergolab::averaging::coprimality_measure(&b).map_err(py_err)
}

#[pyfunction]
fn tk_l2_discrepancy(b: Vec<u64>, n_max: u64) -> PyResult<f64> {
    ergolab::averaging::tk_l2_discrepancy(&b, n_max).map_err(py_err)
}

#[pyfunction]
fn star_discrepancy(samples: Vec<f64>) -> PyResult<f64> {
    ergolab::equidist::star_discrepancy(&samples).map_err(py_err)
}

#[pyfunction]
fn weyl_sum(seq: Vec<f64>, h: i64) -> PyResult<(f64, f64)> {
    ergolab::equidist::weyl_sum(&seq, h).map(|z| (z.re, z.im)).map_err(py_err)
}

/// Registry listing, as printed by `ergolab list`.
#[pyfunction]
fn list_experiments() -> String {
    ergolab_cli::list_experiments()
}

/// Runs an experiment and returns its CSV report. Notes are returned
/// alongside; a tolerance violation is not an error here.
#[pyfunction]
#[pyo3(signature = (name, params = None))]
fn run_experiment(py: Python<'_>, name: &str, params: Option<BTreeMap<String, String>>) -> PyResult<(String, Vec<String>)> {
    let params = params.unwrap_or_default();
    let pairs: Vec<(&str, &str)> = params.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    let cfg = ergolab_cli::ExperimentConfig::new(name, &pairs);
    let outcome = py.allow_threads(|| ergolab_cli::run_experiment(&cfg)).map_err(|e| match e {
        ergolab_cli::CliError::Resources(m) => PyMemoryError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    })?;
    Ok((outcome.report.to_csv(), outcome.notes))
}

#[pymodule]
fn ergolab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySieve>()?;
    m.add_class::<PyGp>()?;
    m.add_function(wrap_pyfunction!(coprimality_measure, m)?)?;
    m.add_function(wrap_pyfunction!(tk_l2_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(star_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_sum, m)?)?;
    m.add_function(wrap_pyfunction!(list_experiments, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
