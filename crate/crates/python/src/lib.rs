//! Python bindings: fit/predict forests, simulate benchmark models, run Monte Carlo comparisons.

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use splitforest::simbench::{opt_config, run_monte_carlo, Contender, Method, ModelName, SimulationModel};
use splitforest::{Algorithm, BaselineKind, Dataset, Predictor, RngStream};

fn py_err(e: splitforest::Error) -> PyErr {
    if e.is_config_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_model(name: &str) -> PyResult<ModelName> {
    ModelName::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown model `{name}`")))
}

fn parse_algorithm(name: &str) -> PyResult<Algorithm> {
    Algorithm::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown algorithm `{name}`")))
}

fn dataset(x: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<Dataset> {
    Dataset::from_rows(&x, y).map_err(py_err)
}

/// A fitted forest.
#[pyclass(name = "Forest", module = "pysplitforest")]
struct PyForest {
    inner: splitforest::Forest,
}

#[pymethods]
impl PyForest {
    /// Fit `algorithm` ("rf", "et", "intf" or "rsrf") to rows `x` and response `y`.
    /// `params` overrides default settings by name, e.g. {"mtry": "3"}.
    #[staticmethod]
    #[pyo3(signature = (x, y, algorithm, seed, params = None))]
    fn fit(
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        algorithm: &str,
        seed: u64,
        params: Option<HashMap<String, String>>,
    ) -> PyResult<Self> {
        let data = dataset(x, y)?;
        let mut config = parse_algorithm(algorithm)?.default_config(data.d());
        let mut params: Vec<(String, String)> = params.unwrap_or_default().into_iter().collect();
        params.sort();
        for (k, v) in &params {
            config.apply_setting(k, v).map_err(py_err)?;
        }
        let inner = splitforest::fit_forest(&data, &config, seed).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn predict(&self, x: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        x.iter()
            .map(|row| {
                if row.len() != self.inner.n_features {
                    return Err(PyValueError::new_err(format!(
                        "expected {} features, got {}",
                        self.inner.n_features,
                        row.len()
                    )));
                }
                Ok(self.inner.predict(row))
            })
            .collect()
    }

    #[getter]
    fn num_trees(&self) -> usize {
        self.inner.trees.len()
    }

    #[getter]
    fn config(&self) -> String {
        self.inner.config.describe()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = splitforest::Forest::from_json(text).map_err(py_err)?;
        Ok(Self { inner })
    }
}

/// Rows, responses and noiseless regression values.
type Sample = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>);

/// Draw `n` rows from a benchmark model: returns (x, y, noiseless truth).
#[pyfunction]
#[pyo3(signature = (model, n, seed, d = None))]
fn simulate(model: &str, n: usize, seed: u64, d: Option<usize>) -> PyResult<Sample> {
    let name = parse_model(model)?;
    let model = SimulationModel::new(name, d.unwrap_or(name.default_d())).map_err(py_err)?;
    let sim = model.generate(n, &mut RngStream::new(seed, 0));
    let x = (0..n).map(|i| sim.data.row(i)).collect();
    Ok((x, sim.data.response().to_vec(), sim.truth))
}

/// Best axis split `(feature, threshold, impurity decrease)` of the whole sample, or None.
#[pyfunction]
fn best_cart_split(x: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<Option<(usize, f64, f64)>> {
    let data = dataset(x, y)?;
    let rows: Vec<usize> = (0..data.n()).collect();
    let all: Vec<usize> = (0..data.d()).collect();
    Ok(splitforest::best_cart_split(&rows, &all, &data, 1).map(|s| (s.feature, s.threshold, s.gain)))
}

/// Monte Carlo comparison on a benchmark model; returns the CSV report.
/// `methods` may contain rf, et, intf, rsrf, rsrf_af, mean_y and one_nn; forests
/// use the tuned settings for the model when available.
#[pyfunction]
#[pyo3(signature = (model, methods, reps, seed, d = None))]
fn monte_carlo(model: &str, methods: Vec<String>, reps: usize, seed: u64, d: Option<usize>) -> PyResult<String> {
    let name = parse_model(model)?;
    let d = d.unwrap_or(name.default_d());
    let sim = SimulationModel::new(name, d).map_err(py_err)?;
    let methods = methods
        .iter()
        .map(|m| {
            let contender = match m.as_str() {
                "mean_y" => return Ok(Method::Baseline(BaselineKind::MeanY)),
                "one_nn" => return Ok(Method::Baseline(BaselineKind::OneNn)),
                "rsrf_af" => Contender::RsrfFixed,
                "rf" => Contender::Rf,
                "et" => Contender::Et,
                "intf" => Contender::Intf,
                "rsrf" => Contender::Rsrf,
                other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
            };
            let config = match opt_config(name, d, contender) {
                Some(c) => c,
                None => parse_algorithm(m.trim_end_matches("_af"))?.default_config(d),
            };
            Ok(Method::labelled(contender.label(), config))
        })
        .collect::<PyResult<Vec<_>>>()?;
    let report = run_monte_carlo(sim, &methods, reps, seed).map_err(py_err)?;
    Ok(report.to_csv())
}

#[pymodule]
fn pysplitforest(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyForest>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(best_cart_split, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    Ok(())
}
