//! Python bindings for the frontier-estimation library.
//!
//! Exposes the dataset/transformed-sample types, the FDH and conditional
//! quantile operations, the tail-index and frontier estimators, threshold
//! selection, the scenario generators and the Monte Carlo runner. Results
//! come back as small wrapper classes or plain tuples/dicts.

use evfront::select::{
    select_k_frontier, select_k_known_rho_star, select_k_moment_endpoint, select_k_moment_rho,
    select_k_pickands_rho, select_k_pickands_star, KSelection,
};
use evfront::{
    mc, Dataset, EstimatorSpec, ExperimentConfig, FrontierEstimate, KPolicy, Observation,
    ScenarioKind, TailEstimatorKind, TailIndexEstimate, TransformedSample,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err<T>(e: evfront::Error) -> PyResult<T> {
    Err(PyValueError::new_err(e.to_string()))
}

fn scenario_kind(name: &str) -> PyResult<ScenarioKind> {
    match name {
        "triangle" | "uniform-triangle" => Ok(ScenarioKind::UniformTriangle),
        "cobb-douglas" | "cobbdouglas" => Ok(ScenarioKind::CobbDouglas),
        other => Err(PyValueError::new_err(format!(
            "unknown scenario {other:?}; expected 'triangle' or 'cobb-douglas'"
        ))),
    }
}

/// Immutable sample of input vectors and scalar outputs.
#[pyclass(name = "Dataset", frozen)]
pub struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    /// Dataset(xs, ys): xs is a list of input vectors, ys the outputs.
    #[new]
    fn new(xs: Vec<Vec<f64>>, ys: Vec<f64>) -> PyResult<Self> {
        if xs.len() != ys.len() {
            return Err(PyValueError::new_err(format!(
                "xs has {} rows but ys has {}",
                xs.len(),
                ys.len()
            )));
        }
        let obs: Result<Vec<_>, _> = xs
            .into_iter()
            .zip(ys)
            .map(|(x, y)| Observation::new(x, y))
            .collect();
        match obs.and_then(Dataset::new) {
            Ok(inner) => Ok(Self { inner }),
            Err(e) => err(e),
        }
    }

    /// Univariate convenience constructor from parallel x/y lists.
    #[staticmethod]
    fn from_xy(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<Self> {
        Self::new(xs.into_iter().map(|x| vec![x]).collect(), ys)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }

    /// Fraction of observations dominated by x.
    fn empirical_fx(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.empirical_fx(&x).or_else(err)
    }

    /// Conditional cdf of the output given dominated inputs.
    fn conditional_cdf(&self, y: f64, x: Vec<f64>) -> PyResult<f64> {
        self.inner.conditional_cdf(y, &x).or_else(err)
    }

    /// Conditional empirical quantile at level alpha in (0, 1].
    fn conditional_quantile(&self, alpha: f64, x: Vec<f64>) -> PyResult<f64> {
        self.inner.conditional_quantile(alpha, &x).or_else(err)
    }

    /// FDH frontier value at x.
    fn fdh(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.fdh(&x).or_else(err)
    }

    /// Transformed sample at x.
    fn transform(&self, x: Vec<f64>) -> PyResult<PyTransformedSample> {
        match self.inner.transform(&x) {
            Ok(inner) => Ok(PyTransformedSample { inner }),
            Err(e) => err(e),
        }
    }

    /// Copy with one appended observation.
    fn with_outlier(&self, x: Vec<f64>, y: f64) -> PyResult<Self> {
        match evfront::inject_outlier(&self.inner, &x, y) {
            Ok(inner) => Ok(Self { inner }),
            Err(e) => err(e),
        }
    }

    fn rows(&self) -> Vec<(Vec<f64>, f64)> {
        self.inner
            .observations()
            .iter()
            .map(|o| (o.inputs().to_vec(), o.output()))
            .collect()
    }
}

/// Sorted transformed values at a query point, with the dominated count.
#[pyclass(name = "TransformedSample", frozen)]
pub struct PyTransformedSample {
    inner: TransformedSample,
}

#[pymethods]
impl PyTransformedSample {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn n_x(&self) -> usize {
        self.inner.n_x()
    }

    #[getter]
    fn z_sorted(&self) -> Vec<f64> {
        self.inner.z_sorted().to_vec()
    }

    fn fdh(&self) -> PyResult<f64> {
        self.inner.fdh().or_else(err)
    }

    /// Order statistic Z_(n-k): the conditional quantile at 1 - k/n_x.
    fn order_stat_quantile(&self, k: usize) -> PyResult<f64> {
        self.inner.order_stat_quantile(k).or_else(err)
    }
}

/// Tail-index estimate with threshold, variance and optional interval.
#[pyclass(name = "TailIndexEstimate", frozen)]
pub struct PyTailIndexEstimate {
    inner: TailIndexEstimate,
}

#[pymethods]
impl PyTailIndexEstimate {
    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind {
            TailEstimatorKind::Pickands => "pickands",
            TailEstimatorKind::Moment => "moment",
        }
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn rho(&self) -> Option<f64> {
        self.inner.rho()
    }

    #[getter]
    fn variance(&self) -> Option<f64> {
        self.inner.variance()
    }

    #[getter]
    fn failed(&self) -> bool {
        self.inner.is_failed()
    }

    #[getter]
    fn failure(&self) -> Option<String> {
        self.inner.failure().map(|f| f.to_string())
    }

    /// Plug-in confidence interval (lo, hi) or None for failed estimates.
    fn confidence_interval(&self, level: f64) -> PyResult<Option<(f64, f64)>> {
        match evfront::rho_confidence_interval(&self.inner, level) {
            Ok(ci) => Ok(ci.map(|c| (c.lo, c.hi))),
            Err(e) => err(e),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "TailIndexEstimate(kind={:?}, k={}, rho={:?})",
            self.kind(),
            self.inner.k,
            self.inner.rho()
        )
    }
}

/// Frontier estimate with threshold, optional interval and failure flag.
#[pyclass(name = "FrontierEstimate", frozen)]
pub struct PyFrontierEstimate {
    inner: FrontierEstimate,
}

#[pymethods]
impl PyFrontierEstimate {
    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.to_string()
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x.clone()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn value(&self) -> Option<f64> {
        self.inner.value
    }

    #[getter]
    fn rho_used(&self) -> Option<f64> {
        self.inner.rho_used
    }

    /// (lo, hi, level) or None.
    #[getter]
    fn ci(&self) -> Option<(f64, f64, f64)> {
        self.inner.ci.map(|c| (c.lo, c.hi, c.level))
    }

    #[getter]
    fn variance_formula(&self) -> Option<String> {
        self.inner.ci.map(|c| c.formula.to_string())
    }

    #[getter]
    fn failed(&self) -> bool {
        self.inner.is_failed()
    }

    #[getter]
    fn failure(&self) -> Option<String> {
        self.inner.failure.map(|f| f.to_string())
    }

    fn __repr__(&self) -> String {
        format!(
            "FrontierEstimate(kind={:?}, k={}, value={:?})",
            self.inner.kind.to_string(),
            self.inner.k,
            self.inner.value
        )
    }
}

/// Threshold-selection outcome: the sweep grid, rolling deviations and
/// the chosen threshold.
#[pyclass(name = "KSelection", frozen)]
pub struct PyKSelection {
    inner: KSelection,
}

#[pymethods]
impl PyKSelection {
    #[getter]
    fn target(&self) -> String {
        self.inner.target.to_string()
    }

    #[getter]
    fn chosen_k(&self) -> usize {
        self.inner.chosen_k
    }

    #[getter]
    fn window_halfwidth(&self) -> usize {
        self.inner.window_halfwidth
    }

    /// List of (k, estimate-or-None) in grid order.
    #[getter]
    fn grid(&self) -> Vec<(usize, Option<f64>)> {
        self.inner.grid.iter().map(|g| (g.k, g.estimate)).collect()
    }

    /// Rolling standard deviation per window position (NaN = window
    /// contains a failure).
    #[getter]
    fn rolling_sd(&self) -> Vec<f64> {
        self.inner.rolling_sd.clone()
    }
}

fn wrap_tail(r: evfront::Result<TailIndexEstimate>) -> PyResult<PyTailIndexEstimate> {
    match r {
        Ok(inner) => Ok(PyTailIndexEstimate { inner }),
        Err(e) => err(e),
    }
}

fn wrap_frontier(r: evfront::Result<FrontierEstimate>) -> PyResult<PyFrontierEstimate> {
    match r {
        Ok(inner) => Ok(PyFrontierEstimate { inner }),
        Err(e) => err(e),
    }
}

fn wrap_selection(r: evfront::Result<KSelection>) -> PyResult<PyKSelection> {
    match r {
        Ok(inner) => Ok(PyKSelection { inner }),
        Err(e) => err(e),
    }
}

/// Pickands tail-index estimate at threshold k.
#[pyfunction]
fn pickands_rho(ts: &PyTransformedSample, k: usize) -> PyResult<PyTailIndexEstimate> {
    wrap_tail(evfront::pickands_rho(&ts.inner, k))
}

/// Moment tail-index estimate at threshold k.
#[pyfunction]
fn moment_rho(ts: &PyTransformedSample, k: usize) -> PyResult<PyTailIndexEstimate> {
    wrap_tail(evfront::moment_rho(&ts.inner, k))
}

/// The two log-spacing moments (m1, m2) at threshold k.
#[pyfunction]
fn moment_sums(ts: &PyTransformedSample, k: usize) -> PyResult<(f64, f64)> {
    match evfront::moment_sums(&ts.inner, k) {
        Ok(s) => Ok((s.m1, s.m2)),
        Err(e) => err(e),
    }
}

/// Asymptotic variance of the Pickands tail-index estimator.
#[pyfunction]
fn pickands_variance(rho: f64) -> PyResult<f64> {
    evfront::pickands_variance(rho).or_else(err)
}

/// Asymptotic variance of the moment tail-index estimator.
#[pyfunction]
fn moment_variance(rho: f64) -> PyResult<f64> {
    evfront::moment_variance(rho).or_else(err)
}

/// Pickands stability plot: list of (k, rho-or-None).
#[pyfunction]
fn pickands_plot(ts: &PyTransformedSample) -> PyResult<Vec<(usize, Option<f64>)>> {
    match evfront::pickands_plot(&ts.inner) {
        Ok(points) => Ok(points.into_iter().map(|p| (p.k, p.outcome.ok())).collect()),
        Err(e) => err(e),
    }
}

/// Order-statistic frontier Z_(n-k) as an estimate object.
#[pyfunction]
fn robust_frontier(ts: &PyTransformedSample, k: usize) -> PyResult<PyFrontierEstimate> {
    wrap_frontier(evfront::robust_frontier(&ts.inner, k))
}

/// Pickands-corrected endpoint estimate with confidence interval.
#[pyfunction]
#[pyo3(signature = (ts, k, level = 0.95))]
fn pickands_star(ts: &PyTransformedSample, k: usize, level: f64) -> PyResult<PyFrontierEstimate> {
    wrap_frontier(evfront::pickands_star(&ts.inner, k, level))
}

/// Known-tail-index endpoint estimate with confidence interval.
#[pyfunction]
#[pyo3(signature = (ts, k, rho, level = 0.95))]
fn known_rho_star(
    ts: &PyTransformedSample,
    k: usize,
    rho: f64,
    level: f64,
) -> PyResult<PyFrontierEstimate> {
    wrap_frontier(evfront::known_rho_star(&ts.inner, k, rho, level))
}

/// Moment endpoint estimate with confidence interval.
#[pyfunction]
#[pyo3(signature = (ts, k, level = 0.95))]
fn moment_endpoint(ts: &PyTransformedSample, k: usize, level: f64) -> PyResult<PyFrontierEstimate> {
    wrap_frontier(evfront::moment_endpoint(&ts.inner, k, level))
}

/// Endpoint estimate with known tail index and tail constant; the
/// interval uses the exact standard normal pivot.
#[pyfunction]
#[pyo3(signature = (ts, k, rho, ell, level = 0.95))]
fn known_ell_ci(
    ts: &PyTransformedSample,
    k: usize,
    rho: f64,
    ell: f64,
    level: f64,
) -> PyResult<PyFrontierEstimate> {
    wrap_frontier(evfront::known_ell_ci(&ts.inner, k, rho, ell, level))
}

/// High conditional quantile interval from Pickands spacings.
#[pyfunction]
#[pyo3(signature = (ts, p_n, level = 0.95))]
fn extreme_quantile_ci_pickands(
    ts: &PyTransformedSample,
    p_n: f64,
    level: f64,
) -> PyResult<PyFrontierEstimate> {
    wrap_frontier(evfront::extreme_quantile_ci_pickands(&ts.inner, p_n, level))
}

/// High conditional quantile interval from log-spacing moments.
#[pyfunction]
#[pyo3(signature = (ts, p_n, level = 0.95))]
fn extreme_quantile_ci_moment(
    ts: &PyTransformedSample,
    p_n: f64,
    level: f64,
) -> PyResult<PyFrontierEstimate> {
    wrap_frontier(evfront::extreme_quantile_ci_moment(&ts.inner, p_n, level))
}

/// Two-step estimator: tail index estimated at k_rho ('pickands' or
/// 'moment'), then the known-index endpoint at k_front.
#[pyfunction]
#[pyo3(signature = (ts, k_rho, k_front, source = "moment", level = 0.95))]
fn two_step_known_rho(
    ts: &PyTransformedSample,
    k_rho: usize,
    k_front: usize,
    source: &str,
    level: f64,
) -> PyResult<PyFrontierEstimate> {
    let source = match source {
        "pickands" => TailEstimatorKind::Pickands,
        "moment" => TailEstimatorKind::Moment,
        other => {
            return Err(PyValueError::new_err(format!(
                "source must be 'pickands' or 'moment', got {other:?}"
            )))
        }
    };
    wrap_frontier(evfront::two_step_known_rho(
        &ts.inner, k_rho, k_front, source, level,
    ))
}

/// Threshold selection for the Pickands tail-index sweep.
#[pyfunction]
fn select_k_pickands(ts: &PyTransformedSample) -> PyResult<PyKSelection> {
    wrap_selection(select_k_pickands_rho(&ts.inner))
}

/// Threshold selection for the moment tail-index sweep.
#[pyfunction]
fn select_k_moment(ts: &PyTransformedSample) -> PyResult<PyKSelection> {
    wrap_selection(select_k_moment_rho(&ts.inner))
}

/// Threshold selection for a frontier estimator: 'pickands', 'moment',
/// 'robust', or 'knownrho' with a tail index, or any Python callable
/// mapping k to a value (None marks a failure at that k).
#[pyfunction]
#[pyo3(signature = (ts, estimator, rho = None, level = 0.95))]
fn select_k_for_frontier(
    ts: &PyTransformedSample,
    estimator: &Bound<'_, PyAny>,
    rho: Option<f64>,
    level: f64,
) -> PyResult<PyKSelection> {
    if let Ok(name) = estimator.extract::<String>() {
        return match name.as_str() {
            "pickands" => wrap_selection(select_k_pickands_star(&ts.inner, level)),
            "moment" => wrap_selection(select_k_moment_endpoint(&ts.inner, level)),
            "robust" => wrap_selection(select_k_frontier(&ts.inner, |k| {
                evfront::robust_frontier(&ts.inner, k)
                    .ok()
                    .and_then(|e| e.value)
            })),
            "knownrho" => {
                let rho = rho.ok_or_else(|| {
                    PyValueError::new_err("estimator 'knownrho' needs the rho argument")
                })?;
                wrap_selection(select_k_known_rho_star(&ts.inner, rho, level))
            }
            other => Err(PyValueError::new_err(format!(
                "unknown estimator {other:?}; pass a name or a callable"
            ))),
        };
    }
    let sel = select_k_frontier(&ts.inner, |k| {
        estimator
            .call1((k,))
            .ok()
            .and_then(|v| v.extract::<Option<f64>>().ok())
            .flatten()
    });
    wrap_selection(sel)
}

/// Seeded sample from the triangle benchmark model.
#[pyfunction]
fn gen_uniform_triangle(n: usize, seed: u64) -> PyDataset {
    PyDataset {
        inner: evfront::gen_uniform_triangle(n, seed),
    }
}

/// Seeded sample from the Cobb-Douglas benchmark model.
#[pyfunction]
fn gen_cobb_douglas(n: usize, seed: u64) -> PyDataset {
    PyDataset {
        inner: evfront::gen_cobb_douglas(n, seed),
    }
}

/// Exact ground-truth quantities of a scenario as a dict of callables'
/// results at x: frontier, rho, ell, fx.
#[pyfunction]
fn ground_truth(py: Python<'_>, scenario: &str, x: f64) -> PyResult<Py<PyDict>> {
    let gt = evfront::GroundTruth::new(scenario_kind(scenario)?);
    let d = PyDict::new(py);
    d.set_item("frontier", gt.frontier(x))?;
    d.set_item("rho", gt.rho(x))?;
    d.set_item("ell", gt.ell(x))?;
    d.set_item("fx", gt.fx(x))?;
    Ok(d.into())
}

/// Deterministic per-replication seed derivation.
#[pyfunction]
fn derive_seed(base: u64, index: u64) -> u64 {
    evfront::derive_seed(base, index)
}

/// Leading term of the k-th moment of the FDH deviation from the
/// frontier under a constant tail term.
#[pyfunction]
fn fdh_moment_oracle(k: u32, n: usize, rho: f64, ell: f64) -> PyResult<f64> {
    evfront::fdh_moment_oracle(k, n, rho, ell).or_else(err)
}

/// Run a Monte Carlo experiment. Estimator tokens are the same as the
/// command line (fdh, robust, pickands, knownrho:<rho>, moment,
/// rho-pickands, rho-moment, ...); k is 'auto', an integer, or 'grid:<j>'.
/// Returns a list of dicts, one per (x, estimator) cell.
#[pyfunction]
#[pyo3(signature = (scenario, n, reps, xs, estimators, k = "auto", level = 0.95, seed = 42))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    scenario: &str,
    n: usize,
    reps: usize,
    xs: Vec<f64>,
    estimators: Vec<String>,
    k: &str,
    level: f64,
    seed: u64,
) -> PyResult<Vec<Py<PyDict>>> {
    let default_k = KPolicy::parse(k).or_else(err)?;
    let specs: Vec<EstimatorSpec> = estimators
        .iter()
        .map(|t| EstimatorSpec::parse(t, default_k))
        .collect::<Result<_, _>>()
        .or_else(err)?;
    let cfg = ExperimentConfig {
        scenario: scenario_kind(scenario)?,
        sample_size: n,
        replications: reps,
        query_points: xs,
        estimators: specs,
        ci_level: level,
        base_seed: seed,
    };
    let report = mc::run_experiment(&cfg).or_else(err)?;
    report
        .cells
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("x", c.x)?;
            d.set_item("estimator", &c.estimator)?;
            d.set_item("k_mean", c.k_mean)?;
            d.set_item("bias", c.bias)?;
            d.set_item("mse", c.mse)?;
            d.set_item("avg_ci_length", c.avg_ci_length)?;
            d.set_item("coverage", c.coverage)?;
            d.set_item("failure_rate", c.failure_rate)?;
            d.set_item("truth", c.truth)?;
            d.set_item("mean_n_x", c.mean_n_x)?;
            Ok(d.into())
        })
        .collect()
}

#[pymodule]
fn evfront_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyTransformedSample>()?;
    m.add_class::<PyTailIndexEstimate>()?;
    m.add_class::<PyFrontierEstimate>()?;
    m.add_class::<PyKSelection>()?;
    m.add_function(wrap_pyfunction!(pickands_rho, m)?)?;
    m.add_function(wrap_pyfunction!(moment_rho, m)?)?;
    m.add_function(wrap_pyfunction!(moment_sums, m)?)?;
    m.add_function(wrap_pyfunction!(pickands_variance, m)?)?;
    m.add_function(wrap_pyfunction!(moment_variance, m)?)?;
    m.add_function(wrap_pyfunction!(pickands_plot, m)?)?;
    m.add_function(wrap_pyfunction!(robust_frontier, m)?)?;
    m.add_function(wrap_pyfunction!(pickands_star, m)?)?;
    m.add_function(wrap_pyfunction!(known_rho_star, m)?)?;
    m.add_function(wrap_pyfunction!(moment_endpoint, m)?)?;
    m.add_function(wrap_pyfunction!(known_ell_ci, m)?)?;
    m.add_function(wrap_pyfunction!(extreme_quantile_ci_pickands, m)?)?;
    m.add_function(wrap_pyfunction!(extreme_quantile_ci_moment, m)?)?;
    m.add_function(wrap_pyfunction!(two_step_known_rho, m)?)?;
    m.add_function(wrap_pyfunction!(select_k_pickands, m)?)?;
    m.add_function(wrap_pyfunction!(select_k_moment, m)?)?;
    m.add_function(wrap_pyfunction!(select_k_for_frontier, m)?)?;
    m.add_function(wrap_pyfunction!(gen_uniform_triangle, m)?)?;
    m.add_function(wrap_pyfunction!(gen_cobb_douglas, m)?)?;
    m.add_function(wrap_pyfunction!(ground_truth, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    m.add_function(wrap_pyfunction!(fdh_moment_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
