//! Python bindings for the cross-variance toolkit.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use crossvar::hypothesis::DegreesOfFreedom;
use crossvar::{Error, NPolicy};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonConvergence { .. } | Error::Overflow { .. } | Error::Quadrature { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn policy(name: &str) -> PyResult<NPolicy> {
    name.parse().map_err(to_py)
}

fn sample(values: Vec<f64>) -> PyResult<crossvar::Sample> {
    crossvar::Sample::new(values).map_err(to_py)
}

fn alpha(a: f64) -> PyResult<crossvar::Alpha> {
    crossvar::Alpha::new(a).map_err(to_py)
}

/// Outcome of one hypothesis test.
#[pyclass(name = "TestResult", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTestResult {
    inner: crossvar::TestResult,
}

#[pymethods]
impl PyTestResult {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.as_str()
    }

    #[getter]
    fn statistic(&self) -> f64 {
        self.inner.statistic
    }

    /// Degrees of freedom: a float, or a (numerator, denominator) pair for the F-test.
    #[getter]
    fn df(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        Ok(match self.inner.df {
            DegreesOfFreedom::Single(d) => d.into_pyobject(py)?.into_any().unbind(),
            DegreesOfFreedom::Pair(a, b) => (a, b).into_pyobject(py)?.into_any().unbind(),
        })
    }

    #[getter]
    fn p_value(&self) -> f64 {
        self.inner.p_value
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha.get()
    }

    #[getter]
    fn decision(&self) -> &'static str {
        self.inner.decision.as_str()
    }

    #[getter]
    fn reject(&self) -> bool {
        self.inner.decision == crossvar::Decision::Reject
    }

    #[getter]
    fn n_policy(&self) -> Option<&'static str> {
        self.inner.n_policy_used.map(NPolicy::as_str)
    }

    #[getter]
    fn effective_n(&self) -> Option<f64> {
        self.inner.effective_n
    }

    fn __repr__(&self) -> String {
        format!(
            "TestResult(method={}, statistic={}, p_value={}, decision={})",
            self.inner.method.as_str(),
            self.inner.statistic,
            self.inner.p_value,
            self.inner.decision.as_str()
        )
    }
}

/// Exact null distribution of T* for group size n.
#[pyclass(name = "TstarModel", frozen, skip_from_py_object)]
struct PyTstarModel {
    inner: crossvar::TstarModel,
}

#[pymethods]
impl PyTstarModel {
    #[new]
    fn new(n: f64) -> PyResult<Self> {
        Ok(Self {
            inner: crossvar::TstarModel::new(n).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> f64 {
        self.inner.n()
    }

    fn pdf(&self, t: f64) -> PyResult<f64> {
        crossvar::tstar_pdf(t, &self.inner).map_err(to_py)
    }

    fn cdf(&self, t: f64) -> PyResult<f64> {
        crossvar::tstar_cdf(t, &self.inner).map_err(to_py)
    }

    fn cdf_series(&self, t: f64) -> PyResult<f64> {
        crossvar::tstar_cdf_series(t, &self.inner, crossvar::SeriesControl::default())
            .map(|s| s.value)
            .map_err(to_py)
    }

    fn quantile(&self, p: f64) -> PyResult<f64> {
        crossvar::tstar_quantile(p, &self.inner).map_err(to_py)
    }
}

/// Distribution of T when the two groups have known, possibly unequal, variances.
#[pyclass(name = "GeneralModel", frozen, skip_from_py_object)]
struct PyGeneralModel {
    inner: crossvar::GeneralModel,
}

#[pymethods]
impl PyGeneralModel {
    #[new]
    fn new(n: usize, sigma_x2: f64, sigma_y2: f64) -> PyResult<Self> {
        Ok(Self {
            inner: crossvar::GeneralModel::new(n, sigma_x2, sigma_y2).map_err(to_py)?,
        })
    }

    fn joint_pdf(&self, z1: f64, z2: f64) -> PyResult<f64> {
        crossvar::joint_pdf_z1z2(z1, z2, &self.inner).map_err(to_py)
    }

    fn cdf(&self, t: f64) -> PyResult<f64> {
        crossvar::general_cdf_quadrature(t, &self.inner)
            .map(|q| q.value)
            .map_err(to_py)
    }

    fn pdf(&self, t: f64) -> PyResult<f64> {
        crossvar::general_pdf_quadrature(t, &self.inner)
            .map(|q| q.value)
            .map_err(to_py)
    }

    /// Series value and whether it converged.
    fn cdf_series(&self, t: f64) -> PyResult<(f64, bool)> {
        crossvar::general_cdf_series(t, &self.inner, crossvar::SeriesCaps::default())
            .map(|s| (s.value, s.converged))
            .map_err(to_py)
    }

    fn sample(&self, reps: usize, seed: u64) -> PyResult<Vec<f64>> {
        crossvar::sample_t(&self.inner, reps, seed).map_err(to_py)
    }
}

#[pyfunction]
#[pyo3(signature = (x, y, alpha = 0.05, n_policy = "max"))]
fn crossvar_test(x: Vec<f64>, y: Vec<f64>, alpha: f64, n_policy: &str) -> PyResult<PyTestResult> {
    let r = crossvar::crossvar_test(&sample(x)?, &sample(y)?, self::alpha(alpha)?, policy(n_policy)?);
    Ok(PyTestResult {
        inner: r.map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (x, y, alpha = 0.05))]
fn pooled_t_test(x: Vec<f64>, y: Vec<f64>, alpha: f64) -> PyResult<PyTestResult> {
    let r = crossvar::pooled_t_test(&sample(x)?, &sample(y)?, self::alpha(alpha)?);
    Ok(PyTestResult {
        inner: r.map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (x, y, alpha = 0.05))]
fn f_variance_test(x: Vec<f64>, y: Vec<f64>, alpha: f64) -> PyResult<PyTestResult> {
    let r = crossvar::f_variance_test(&sample(x)?, &sample(y)?, self::alpha(alpha)?);
    Ok(PyTestResult {
        inner: r.map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (x, y, n_policy = "max"))]
fn statistic_tstar(x: Vec<f64>, y: Vec<f64>, n_policy: &str) -> PyResult<f64> {
    crossvar::statistic_tstar(&sample(x)?, &sample(y)?, policy(n_policy)?).map_err(to_py)
}

/// (z1, z2, t) for two samples.
#[pyfunction]
fn statistic_t(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    let b = crossvar::statistic_t(&sample(x)?, &sample(y)?).map_err(to_py)?;
    Ok((b.z1, b.z2, b.t))
}

/// Bundled dataset as (x, y).
#[pyfunction]
fn dataset(name: &str) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let d = crossvar::datasets::dataset(name).map_err(to_py)?;
    Ok((d.x.to_vec(), d.y.to_vec()))
}

/// Power curve as a list of (mu_y, proposed_power, t_power).
#[pyfunction]
#[pyo3(signature = (n, sigma, mu_y_grid, reps = 500, alpha = 0.01, mu_x = 9.2, seed = 42, quantile_mode = "empirical"))]
#[allow(clippy::too_many_arguments)]
fn power_study(
    n: usize,
    sigma: f64,
    mu_y_grid: Vec<f64>,
    reps: usize,
    alpha: f64,
    mu_x: f64,
    seed: u64,
    quantile_mode: &str,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let quantile_mode = match quantile_mode {
        "empirical" => crossvar::QuantileMode::Empirical,
        "analytic" => crossvar::QuantileMode::Analytic,
        other => return Err(PyValueError::new_err(format!("unknown quantile mode '{other}'"))),
    };
    let cfg = crossvar::StudyConfig {
        n,
        reps,
        alpha: self::alpha(alpha)?,
        mu_x,
        mu_y_grid,
        sigma,
        seed,
        quantile_mode,
    };
    let curve = crossvar::run_power_study(&cfg).map_err(to_py)?;
    Ok(curve
        .points
        .iter()
        .map(|p| (p.mu_y, p.proposed_power, p.t_power))
        .collect())
}

/// Type-I rates at 0.05 and 0.01 (and `alpha` if different) as
/// {alpha: (proposed, t)}, plus whether decisions matched replicate by replicate.
#[pyfunction]
#[pyo3(signature = (n, sigma, reps = 500, alpha = 0.05, mu = 9.2, seed = 42))]
fn type1_study(
    n: usize,
    sigma: f64,
    reps: usize,
    alpha: f64,
    mu: f64,
    seed: u64,
) -> PyResult<(Vec<(f64, f64, f64)>, bool)> {
    let cfg = crossvar::StudyConfig {
        n,
        reps,
        alpha: self::alpha(alpha)?,
        mu_x: mu,
        mu_y_grid: Vec::new(),
        sigma,
        seed,
        quantile_mode: crossvar::QuantileMode::Empirical,
    };
    let table = crossvar::run_type1_study(&cfg).map_err(to_py)?;
    let row = &table.rows[0];
    Ok((
        row.rates.iter().map(|c| (c.alpha, c.proposed, c.t)).collect(),
        row.identical_decisions,
    ))
}

#[pymodule]
fn crossvar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTestResult>()?;
    m.add_class::<PyTstarModel>()?;
    m.add_class::<PyGeneralModel>()?;
    m.add_function(wrap_pyfunction!(crossvar_test, m)?)?;
    m.add_function(wrap_pyfunction!(pooled_t_test, m)?)?;
    m.add_function(wrap_pyfunction!(f_variance_test, m)?)?;
    m.add_function(wrap_pyfunction!(statistic_tstar, m)?)?;
    m.add_function(wrap_pyfunction!(statistic_t, m)?)?;
    m.add_function(wrap_pyfunction!(dataset, m)?)?;
    m.add_function(wrap_pyfunction!(power_study, m)?)?;
    m.add_function(wrap_pyfunction!(type1_study, m)?)?;
    Ok(())
}
