//! Python bindings for the picscore toolkit.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use picscore::baselines::BaselineKind;
use picscore::density::{EvalMode, DEFAULT_RESOLUTION};
use picscore::{
    metrics, pic, synth, ConfidenceEstimator, DensityModel, EstimatorKind, PicError, PicThreshold,
};

fn to_py(e: PicError) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyIOError::new_err(e.to_string())
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

/// Genuine and imposter score densities with a genuine prior.
#[pyclass(name = "DensityModel", module = "picscore_py", frozen)]
pub struct PyDensityModel {
    inner: DensityModel,
}

#[pymethods]
impl PyDensityModel {
    #[staticmethod]
    #[pyo3(signature = (genuine, imposter, prior_genuine = 0.5, resolution = DEFAULT_RESOLUTION))]
    fn fit(
        genuine: Vec<f64>,
        imposter: Vec<f64>,
        prior_genuine: f64,
        resolution: usize,
    ) -> PyResult<Self> {
        let inner = DensityModel::fit_scores(&genuine, &imposter, prior_genuine, resolution)
            .map_err(to_py)?;
        Ok(PyDensityModel { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyDensityModel {
            inner: DensityModel::load(path).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyDensityModel {
            inner: DensityModel::from_json(text).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    #[getter]
    fn prior_genuine(&self) -> f64 {
        self.inner.prior_genuine()
    }

    #[getter]
    fn bandwidths(&self) -> (f64, f64) {
        (
            self.inner.genuine().bandwidth(),
            self.inner.imposter().bandwidth(),
        )
    }

    #[pyo3(signature = (s, exact = false))]
    fn density_genuine(&self, s: f64, exact: bool) -> f64 {
        self.inner.genuine().density(s, mode(exact))
    }

    #[pyo3(signature = (s, exact = false))]
    fn density_imposter(&self, s: f64, exact: bool) -> f64 {
        self.inner.imposter().density(s, mode(exact))
    }

    #[pyo3(signature = (s, exact = false))]
    fn pic_single(&self, s: f64, exact: bool) -> f64 {
        pic::pic_single_with(&self.inner, s, mode(exact)).value
    }

    #[pyo3(signature = (scores, exact = false))]
    fn pic_multi(&self, scores: Vec<f64>, exact: bool) -> PyResult<f64> {
        Ok(pic::pic_multi_with(&self.inner, &scores, mode(exact))
            .map_err(to_py)?
            .value)
    }

    fn __repr__(&self) -> String {
        let (hg, hf) = self.bandwidths();
        format!(
            "DensityModel(prior_genuine={}, bandwidths=({hg:.6}, {hf:.6}))",
            self.inner.prior_genuine()
        )
    }
}

fn mode(exact: bool) -> EvalMode {
    if exact {
        EvalMode::Exact
    } else {
        EvalMode::Lookup
    }
}

/// PIC or baseline confidence estimator at a target false match rate.
#[pyclass(name = "ConfidenceEstimator", module = "picscore_py", frozen)]
pub struct PyConfidenceEstimator {
    inner: ConfidenceEstimator,
}

#[pymethods]
impl PyConfidenceEstimator {
    #[new]
    #[pyo3(signature = (kind, model, target_fmr = 1e-3, pic_threshold = "rule"))]
    fn new(kind: &str, model: &PyDensityModel, target_fmr: f64, pic_threshold: &str) -> PyResult<Self> {
        let kind: EstimatorKind = parse(kind)?;
        let pt: PicThreshold = parse(pic_threshold)?;
        Ok(PyConfidenceEstimator {
            inner: ConfidenceEstimator::fit(kind, model.inner.clone(), target_fmr, pt)
                .map_err(to_py)?,
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().as_str()
    }

    #[getter]
    fn raw_threshold(&self) -> f64 {
        self.inner.raw_threshold()
    }

    #[getter]
    fn pic_threshold(&self) -> f64 {
        self.inner.pic_threshold()
    }

    /// Returns `(decision, confidence)` with decision "genuine" or "imposter".
    fn assess(&self, s: f64) -> (&'static str, f64) {
        let d = self.inner.assess(s);
        (d.decision.as_str(), d.confidence)
    }

    fn assess_fused(&self, scores: Vec<f64>) -> PyResult<(&'static str, f64)> {
        let d = self.inner.assess_fused(&scores).map_err(to_py)?;
        Ok((d.decision.as_str(), d.confidence))
    }
}

#[pyfunction]
fn pic_threshold_for_fmr(target_fmr: f64) -> PyResult<f64> {
    pic::pic_threshold_for_fmr(target_fmr).map_err(to_py)
}

/// Returns `(threshold, achieved_fmr, saturated)`.
#[pyfunction]
fn threshold_at_fmr(imposter: Vec<f64>, target_fmr: f64) -> PyResult<(f64, f64, bool)> {
    let t = metrics::threshold_at_fmr(&imposter, target_fmr).map_err(to_py)?;
    Ok((t.threshold, t.fmr, t.saturated))
}

/// Returns `(threshold, fmr, fnmr)`.
#[pyfunction]
fn fnmr_at_fmr(genuine: Vec<f64>, imposter: Vec<f64>, target_fmr: f64) -> PyResult<(f64, f64, f64)> {
    let v = metrics::fnmr_at_fmr(&genuine, &imposter, target_fmr).map_err(to_py)?;
    Ok((v.threshold, v.fmr, v.fnmr))
}

#[pyfunction]
#[pyo3(signature = (confidences, correct, bins = metrics::DEFAULT_ECE_BINS))]
fn ece(confidences: Vec<f64>, correct: Vec<bool>, bins: usize) -> PyResult<f64> {
    metrics::ece(&confidences, &correct, bins).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (confidences, correct, bins = metrics::DEFAULT_ECE_BINS))]
fn mce(confidences: Vec<f64>, correct: Vec<bool>, bins: usize) -> PyResult<f64> {
    metrics::mce(&confidences, &correct, bins).map_err(to_py)
}

/// Returns a list of `(bin_center, pred_mean, pred_std, count)`.
#[pyfunction]
#[pyo3(signature = (true_conf, pred_conf, bins = metrics::DEFAULT_CCC_BINS))]
fn ccc(true_conf: Vec<f64>, pred_conf: Vec<f64>, bins: usize) -> PyResult<Vec<(f64, f64, f64, usize)>> {
    Ok(metrics::ccc(&true_conf, &pred_conf, bins)
        .map_err(to_py)?
        .into_iter()
        .map(|p| (p.bin_center, p.pred_mean, p.pred_std, p.count))
        .collect())
}

fn synth_config(
    n_genuine: usize,
    n_imposter: usize,
    seed: u64,
    genuine_mean: f64,
    imposter_mean: f64,
    std: f64,
) -> synth::SynthConfig {
    synth::SynthConfig {
        n_genuine,
        n_imposter,
        seed,
        genuine_mean,
        imposter_mean,
        genuine_std: std,
        imposter_std: std,
        ..synth::SynthConfig::default()
    }
}

/// Synthetic normal scores; returns `(genuine, imposter)`.
#[pyfunction]
#[pyo3(signature = (n_genuine, n_imposter, seed = 0, genuine_mean = 0.7, imposter_mean = 0.2, std = 0.1))]
fn synth_scores(
    n_genuine: usize,
    n_imposter: usize,
    seed: u64,
    genuine_mean: f64,
    imposter_mean: f64,
    std: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cfg = synth_config(n_genuine, n_imposter, seed, genuine_mean, imposter_mean, std);
    let set = synth::generate(&cfg).map_err(to_py)?;
    Ok((set.genuine_scores().to_vec(), set.imposter_scores().to_vec()))
}

/// Exact posterior under the synthetic normal model.
#[pyfunction]
#[pyo3(signature = (scores, prior_genuine = 0.5, genuine_mean = 0.7, imposter_mean = 0.2, std = 0.1))]
fn analytic_posterior(
    scores: Vec<f64>,
    prior_genuine: f64,
    genuine_mean: f64,
    imposter_mean: f64,
    std: f64,
) -> PyResult<f64> {
    let cfg = synth_config(1, 1, 0, genuine_mean, imposter_mean, std);
    cfg.validate().map_err(to_py)?;
    synth::analytic_fused_posterior(&cfg, &scores, prior_genuine).map_err(to_py)
}

/// Baseline confidence for a raw score; `kind` is "dtc", "lrc" or "erbc".
#[pyfunction]
fn baseline_confidence(
    kind: &str,
    model: &PyDensityModel,
    threshold: f64,
    s: f64,
) -> PyResult<f64> {
    let kind: BaselineKind = parse(kind)?;
    let m = &model.inner;
    let est = picscore::BaselineEstimator::fit(
        kind,
        m,
        m.genuine().train_scores(),
        m.imposter().train_scores(),
        threshold,
    )
    .map_err(to_py)?;
    Ok(est.confidence(m, s))
}

#[pymodule]
fn picscore_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityModel>()?;
    m.add_class::<PyConfidenceEstimator>()?;
    m.add_function(wrap_pyfunction!(pic_threshold_for_fmr, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_at_fmr, m)?)?;
    m.add_function(wrap_pyfunction!(fnmr_at_fmr, m)?)?;
    m.add_function(wrap_pyfunction!(ece, m)?)?;
    m.add_function(wrap_pyfunction!(mce, m)?)?;
    m.add_function(wrap_pyfunction!(ccc, m)?)?;
    m.add_function(wrap_pyfunction!(synth_scores, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_posterior, m)?)?;
    m.add_function(wrap_pyfunction!(baseline_confidence, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
