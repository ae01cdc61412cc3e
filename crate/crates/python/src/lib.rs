//! Python bindings. Structured inputs (laws, gauges, small-ball CDFs) are
//! passed as JSON strings in the same shape as the TOML configuration.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ssalab_core::bdecomp::ProductCF as CoreProductCF;
use ssalab_core::config::{CdfSpec, ExperimentConfig};
use ssalab_core::escape::{self, Gauge};
use ssalab_core::sequences::{self, BuildOptions, PathKind, PathSample, SequenceParams};
use ssalab_core::{harness, levy_lil, Error, IncrementLaw, LawSpec};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Increment law built from a JSON descriptor such as `{"kind": "exponential", "rates": [1.0]}`.
#[pyclass(name = "Law", frozen)]
struct Law(IncrementLaw);

#[pymethods]
impl Law {
    #[new]
    fn new(spec_json: &str) -> PyResult<Self> {
        let spec: LawSpec = from_json(spec_json)?;
        IncrementLaw::new(spec).map(Law).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn atom_at_zero(&self) -> f64 {
        self.0.atom_at_zero()
    }

    /// Characteristic function at `z`, as `(re, im)`.
    fn cf(&self, z: Vec<f64>) -> PyResult<(f64, f64)> {
        if z.len() != self.0.dim() {
            return Err(err(Error::DimensionMismatch { expected: self.0.dim(), got: z.len() }));
        }
        let c = self.0.cf(&z);
        Ok((c.re, c.im))
    }

    /// `count` independent draws, one row per draw.
    fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        self.0.sample(count, seed).rows().map(<[f64]>::to_vec).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(self.0.spec())
    }
}

/// A simulated W or Y path on an integer window.
#[pyclass(name = "Path", frozen)]
struct Path(PathSample);

#[pymethods]
impl Path {
    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind {
            PathKind::ShiftSelfsimilar => "W",
            PathKind::StationaryOu => "Y",
        }
    }

    #[getter]
    fn indices(&self) -> Vec<i64> {
        self.0.indices().collect()
    }

    /// Values, one row per index.
    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        self.0.indices().map(|n| self.0.value(n).to_vec()).collect()
    }

    #[getter]
    fn increments(&self) -> Vec<Vec<f64>> {
        self.0.indices().map(|n| self.0.increment(n).to_vec()).collect()
    }

    #[getter]
    fn truncation_bound(&self) -> f64 {
        self.0.truncation_bound
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    fn value(&self, n: i64) -> PyResult<Vec<f64>> {
        if !self.0.indices().any(|i| i == n) {
            return Err(PyValueError::new_err(format!("index {n} outside the window")));
        }
        Ok(self.0.value(n).to_vec())
    }

    /// The image under the Lamperti map (W to Y or Y to W).
    fn lamperti(&self) -> PyResult<Path> {
        sequences::lamperti(&self.0).map(Path).map_err(err)
    }
}

fn build(law: &Law, a: f64, n_min: i64, n_max: i64, seed: u64, depth: Option<u64>, kind: PathKind) -> PyResult<Path> {
    let params = SequenceParams::new(a, law.0.dim(), n_min, n_max).map_err(err)?;
    let opts = BuildOptions { truncation_depth: depth, ..Default::default() };
    let p = match kind {
        PathKind::ShiftSelfsimilar => sequences::build_w_path(params, &law.0, &opts, seed),
        PathKind::StationaryOu => sequences::build_y_path(params, &law.0, &opts, seed),
    };
    p.map(Path).map_err(err)
}

/// Shift selfsimilar path `W(n)` on `[n_min, n_max]`.
#[pyfunction]
#[pyo3(signature = (law, a, n_min, n_max, seed, truncation_depth=None))]
fn simulate_w(law: &Law, a: f64, n_min: i64, n_max: i64, seed: u64, truncation_depth: Option<u64>) -> PyResult<Path> {
    build(law, a, n_min, n_max, seed, truncation_depth, PathKind::ShiftSelfsimilar)
}

/// Stationary path `Y(n)` sharing increments with `simulate_w` for the same seed.
#[pyfunction]
#[pyo3(signature = (law, a, n_min, n_max, seed, truncation_depth=None))]
fn simulate_y(law: &Law, a: f64, n_min: i64, n_max: i64, seed: u64, truncation_depth: Option<u64>) -> PyResult<Path> {
    build(law, a, n_min, n_max, seed, truncation_depth, PathKind::StationaryOu)
}

/// Infinite product `prod_n rho(b^n z)` for an increment law `rho`.
#[pyclass(name = "ProductCF", frozen)]
struct ProductCF(CoreProductCF);

#[pymethods]
impl ProductCF {
    #[new]
    #[pyo3(signature = (law, b, tol=1e-12, max_terms=100_000))]
    fn new(law: &Law, b: f64, tol: f64, max_terms: usize) -> PyResult<Self> {
        CoreProductCF::from_law(&law.0, b, tol, max_terms).map(ProductCF).map_err(err)
    }

    /// `(re, im, error_bound, terms)` at `z`.
    fn mu_hat(&self, z: Vec<f64>) -> PyResult<(f64, f64, f64, usize)> {
        let m = self.0.mu_hat(&z).map_err(err)?;
        Ok((m.value.re, m.value.im, m.bound, m.terms))
    }

    /// Largest fixed-point residual over `grid`.
    fn fixed_point_residual(&self, grid: Vec<Vec<f64>>) -> PyResult<f64> {
        self.0.check_fixed_point(&grid).map_err(err)
    }
}

/// Series classifier; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (cdf_json, gauge_json, deltas, horizon=100_000, seed=0))]
fn classify(cdf_json: &str, gauge_json: &str, deltas: Vec<f64>, horizon: u64, seed: u64) -> PyResult<String> {
    let cdf = from_json::<CdfSpec>(cdf_json)?.build(seed).map_err(err)?;
    let gauge: Gauge = from_json(gauge_json)?;
    to_json(&escape::sum_classifier(&cdf, &gauge, &deltas, horizon).map_err(err)?)
}

/// Type-A gauge for a small-ball CDF; returns the gauge and its audit as JSON.
#[pyfunction]
#[pyo3(signature = (cdf_json, a, seed=0))]
fn type_a_gauge(cdf_json: &str, a: f64, seed: u64) -> PyResult<String> {
    let cdf = from_json::<CdfSpec>(cdf_json)?.build(seed).map_err(err)?;
    to_json(&escape::construct_type_a_gauge(&cdf, a).map_err(err)?)
}

/// Atom at zero, K_W curve and type-A verdict for a nonnegative law, as JSON.
#[pyfunction]
fn type_a_check(law: &Law, a: f64) -> PyResult<String> {
    to_json(&escape::type_a_check(&law.0, a, None).map_err(err)?)
}

/// Monte Carlo `P(S(1) <= r)` for a positive `alpha`-stable variable, with the fitted exponent.
#[pyfunction]
fn stable_small_ball(alpha: f64, radii: Vec<f64>, count: usize, seed: u64) -> PyResult<String> {
    to_json(&levy_lil::stable_small_ball(alpha, &radii, count, seed).map_err(err)?)
}

/// `P(sup_{s<=t} |B(s)| >= 1)` for one-dimensional Brownian motion.
#[pyfunction]
fn exit_time_cdf_1d(t: f64) -> f64 {
    levy_lil::exit_time_cdf_1d(t)
}

/// Runs a TOML experiment configuration into `out`; returns the run record as JSON.
#[pyfunction]
#[pyo3(signature = (config_toml, out, force=false))]
fn run_experiment(py: Python<'_>, config_toml: &str, out: std::path::PathBuf, force: bool) -> PyResult<String> {
    let cfg = ExperimentConfig::from_toml(config_toml).map_err(err)?;
    let rec = py.detach(|| harness::run(&cfg, &out, force)).map_err(err)?;
    to_json(&rec)
}

/// Invariant suite as `(name, passed, detail)` triples.
#[pyfunction]
#[pyo3(signature = (seed=20_240_601))]
fn check(py: Python<'_>, seed: u64) -> Vec<(String, bool, String)> {
    py.detach(|| harness::check_suite(seed)).into_iter().map(|r| (r.name.to_string(), r.passed, r.detail)).collect()
}

#[pymodule]
fn ssalab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Law>()?;
    m.add_class::<Path>()?;
    m.add_class::<ProductCF>()?;
    m.add_function(wrap_pyfunction!(simulate_w, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_y, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(type_a_gauge, m)?)?;
    m.add_function(wrap_pyfunction!(type_a_check, m)?)?;
    m.add_function(wrap_pyfunction!(stable_small_ball, m)?)?;
    m.add_function(wrap_pyfunction!(exit_time_cdf_1d, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
