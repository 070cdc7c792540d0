//! Score-level baseline confidence estimators.
//!
//! - DTC: distance of the score to the decision threshold.
//! - LRC: log-likelihood ratio of the score.
//! - ERBC: the system error rate at the tabulated threshold nearest the score.
//!
//! All three report decision confidence: the probability-like value that the
//! accept/reject decision taken at `threshold` is correct. DTC and LRC are
//! min-max normalized so that the threshold maps to 0.5 and the most extreme
//! training value on either side maps to 1.0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::{DensityModel, EvalMode};
use crate::error::{PicError, Result};

pub const ERBC_GRID_SIZE: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Dtc,
    Lrc,
    Erbc,
}

impl BaselineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineKind::Dtc => "dtc",
            BaselineKind::Lrc => "lrc",
            BaselineKind::Erbc => "erbc",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dtc" => Ok(BaselineKind::Dtc),
            "lrc" => Ok(BaselineKind::Lrc),
            "erbc" => Ok(BaselineKind::Erbc),
            other => Err(format!("unknown baseline `{other}`")),
        }
    }
}

/// Error-rate curves tabulated on a uniform threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateTable {
    pub start: f64,
    pub step: f64,
    pub fmr: Vec<f64>,
    pub fnmr: Vec<f64>,
}

impl ErrorRateTable {
    pub fn tabulate(genuine: &[f64], imposter: &[f64], size: usize) -> Result<Self> {
        if genuine.is_empty() || imposter.is_empty() {
            return Err(PicError::EmptyInput(
                "error-rate curves need genuine and imposter scores",
            ));
        }
        if size < 2 {
            return Err(PicError::InvalidArgument("threshold grid needs two points".into()));
        }
        let (lo, hi) = genuine
            .iter()
            .chain(imposter)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
                (lo.min(s), hi.max(s))
            });
        let step = (hi - lo) / (size - 1) as f64;
        let mut gen = genuine.to_vec();
        let mut imp = imposter.to_vec();
        gen.sort_by(f64::total_cmp);
        imp.sort_by(f64::total_cmp);
        let (ng, ni) = (gen.len() as f64, imp.len() as f64);
        let mut fmr = Vec::with_capacity(size);
        let mut fnmr = Vec::with_capacity(size);
        for k in 0..size {
            let t = lo + k as f64 * step;
            fmr.push((imp.len() - imp.partition_point(|&s| s < t)) as f64 / ni);
            fnmr.push(gen.partition_point(|&s| s < t) as f64 / ng);
        }
        Ok(ErrorRateTable {
            start: lo,
            step,
            fmr,
            fnmr,
        })
    }

    /// Index of the tabulated threshold closest to `s`.
    pub fn nearest(&self, s: f64) -> usize {
        let last = self.fmr.len() - 1;
        if self.step <= 0.0 || !s.is_finite() {
            return if s > self.start { last } else { 0 };
        }
        let k = ((s - self.start) / self.step).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(last)
        }
    }

    pub fn threshold(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Calibration {
    Dtc { s_min: f64, s_max: f64 },
    Lrc { llr_threshold: f64, llr_min: f64, llr_max: f64 },
    Erbc(ErrorRateTable),
}

/// A baseline fitted on training scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEstimator {
    pub threshold: f64,
    pub calibration: Calibration,
}

impl BaselineEstimator {
    pub fn kind(&self) -> BaselineKind {
        match self.calibration {
            Calibration::Dtc { .. } => BaselineKind::Dtc,
            Calibration::Lrc { .. } => BaselineKind::Lrc,
            Calibration::Erbc(_) => BaselineKind::Erbc,
        }
    }

    pub fn fit_dtc(genuine: &[f64], imposter: &[f64], threshold: f64) -> Result<Self> {
        let (s_min, s_max) = extremes(genuine.iter().chain(imposter).copied())
            .ok_or(PicError::EmptyInput("DTC needs training scores"))?;
        Ok(BaselineEstimator {
            threshold,
            calibration: Calibration::Dtc { s_min, s_max },
        })
    }

    pub fn fit_lrc(
        model: &DensityModel,
        genuine: &[f64],
        imposter: &[f64],
        threshold: f64,
    ) -> Result<Self> {
        let llr = |s: f64| model.log_likelihood_ratio(s, EvalMode::Lookup);
        let (llr_min, llr_max) = extremes(genuine.iter().chain(imposter).map(|&s| llr(s)))
            .ok_or(PicError::EmptyInput("LRC needs training scores"))?;
        Ok(BaselineEstimator {
            threshold,
            calibration: Calibration::Lrc {
                llr_threshold: llr(threshold),
                llr_min,
                llr_max,
            },
        })
    }

    pub fn fit_erbc(genuine: &[f64], imposter: &[f64], threshold: f64) -> Result<Self> {
        Ok(BaselineEstimator {
            threshold,
            calibration: Calibration::Erbc(ErrorRateTable::tabulate(
                genuine,
                imposter,
                ERBC_GRID_SIZE,
            )?),
        })
    }

    pub fn fit(
        kind: BaselineKind,
        model: &DensityModel,
        genuine: &[f64],
        imposter: &[f64],
        threshold: f64,
    ) -> Result<Self> {
        match kind {
            BaselineKind::Dtc => Self::fit_dtc(genuine, imposter, threshold),
            BaselineKind::Lrc => Self::fit_lrc(model, genuine, imposter, threshold),
            BaselineKind::Erbc => Self::fit_erbc(genuine, imposter, threshold),
        }
    }

    pub fn decides_genuine(&self, s: f64) -> bool {
        s >= self.threshold
    }

    /// Decision confidence for `s`. LRC evaluates the likelihood ratio with
    /// `model`; the others ignore it.
    pub fn confidence(&self, model: &DensityModel, s: f64) -> f64 {
        match &self.calibration {
            Calibration::Dtc { s_min, s_max } => dtc(self.threshold, *s_min, *s_max, s),
            Calibration::Lrc {
                llr_threshold,
                llr_min,
                llr_max,
            } => {
                let llr = model.log_likelihood_ratio(s, EvalMode::Lookup);
                lrc(self.decides_genuine(s), *llr_threshold, *llr_min, *llr_max, llr)
            }
            Calibration::Erbc(table) => erbc(table, self.decides_genuine(s), s),
        }
    }
}

fn extremes(xs: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    xs.fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((f64::min(lo, x), f64::max(hi, x))),
    })
}

/// Maps `dist / span` to `[0.5, 1]`; a non-positive span means the query is
/// at or beyond the training extreme.
fn half_to_one(dist: f64, span: f64) -> f64 {
    let c = if span > 0.0 {
        0.5 + 0.5 * dist / span
    } else if dist > 0.0 {
        1.0
    } else {
        0.5
    };
    c.clamp(0.0, 1.0)
}

fn dtc(t: f64, s_min: f64, s_max: f64, s: f64) -> f64 {
    if s >= t {
        half_to_one(s - t, s_max - t)
    } else {
        half_to_one(t - s, t - s_min)
    }
}

fn lrc(genuine: bool, llr_t: f64, llr_min: f64, llr_max: f64, llr: f64) -> f64 {
    if genuine {
        half_to_one(llr - llr_t, llr_max - llr_t)
    } else {
        half_to_one(llr_t - llr, llr_t - llr_min)
    }
}

fn erbc(table: &ErrorRateTable, genuine: bool, s: f64) -> f64 {
    let k = table.nearest(s);
    let err = if genuine { table.fmr[k] } else { table.fnmr[k] };
    (1.0 - err).clamp(0.0, 1.0)
}

fn expect_kind(est: &BaselineEstimator, kind: BaselineKind) -> Result<()> {
    if est.kind() == kind {
        Ok(())
    } else {
        Err(PicError::InvalidArgument(format!(
            "estimator is fitted for {}, not {kind}",
            est.kind()
        )))
    }
}

/// Distance-to-threshold confidence.
pub fn dtc_confidence(est: &BaselineEstimator, s: f64) -> Result<f64> {
    expect_kind(est, BaselineKind::Dtc)?;
    let Calibration::Dtc { s_min, s_max } = est.calibration else {
        unreachable!()
    };
    Ok(dtc(est.threshold, s_min, s_max, s))
}

/// Likelihood-ratio confidence.
pub fn lrc_confidence(est: &BaselineEstimator, model: &DensityModel, s: f64) -> Result<f64> {
    expect_kind(est, BaselineKind::Lrc)?;
    Ok(est.confidence(model, s))
}

/// Error-rate-based confidence.
pub fn erbc_confidence(est: &BaselineEstimator, s: f64) -> Result<f64> {
    expect_kind(est, BaselineKind::Erbc)?;
    let Calibration::Erbc(table) = &est.calibration else {
        unreachable!()
    };
    Ok(erbc(table, est.decides_genuine(s), s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn draws(mean: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Normal::new(mean, 0.1).unwrap();
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    fn model_and_data() -> (DensityModel, Vec<f64>, Vec<f64>) {
        let g = draws(0.7, 3000, 1);
        let f = draws(0.2, 3000, 2);
        let m = DensityModel::fit_scores(&g, &f, 0.5, 2048).unwrap();
        (m, g, f)
    }

    #[test]
    fn dtc_examples() {
        let est = BaselineEstimator::fit_dtc(&[0.2, 1.0], &[-0.2, 0.0], 0.4).unwrap();
        assert_eq!(dtc_confidence(&est, 0.4).unwrap(), 0.5);
        assert_eq!(dtc_confidence(&est, 1.0).unwrap(), 1.0);
        assert_relative_eq!(dtc_confidence(&est, 0.7).unwrap(), 0.75, epsilon = 1e-12);
        assert_eq!(dtc_confidence(&est, -0.2).unwrap(), 1.0);
        assert_eq!(dtc_confidence(&est, 5.0).unwrap(), 1.0);
    }

    #[test]
    fn dtc_is_piecewise_linear_with_minimum_at_threshold() {
        let est = BaselineEstimator::fit_dtc(&[0.2, 1.0], &[-0.2, 0.0], 0.4).unwrap();
        let c = |s| dtc_confidence(&est, s).unwrap();
        for k in 0..=120 {
            let s = -0.2 + k as f64 * 0.01;
            assert!(c(s) >= 0.5);
        }
        // equal steps give equal increments on each side
        assert_relative_eq!(c(0.6) - c(0.5), c(0.5) - c(0.4), epsilon = 1e-12);
        assert_relative_eq!(c(0.1) - c(0.2), c(0.2) - c(0.3), epsilon = 1e-12);
    }

    #[test]
    fn wrong_kind_is_an_error() {
        let est = BaselineEstimator::fit_dtc(&[0.2], &[0.0], 0.1).unwrap();
        assert!(erbc_confidence(&est, 0.1).is_err());
    }

    #[test]
    fn lrc_examples() {
        let (m, g, f) = model_and_data();
        // threshold where the two densities cross
        let crossing = (0..2000)
            .map(|k| 0.3 + k as f64 * 0.0001)
            .min_by(|a, b| {
                m.log_likelihood_ratio(*a, EvalMode::Lookup)
                    .abs()
                    .total_cmp(&m.log_likelihood_ratio(*b, EvalMode::Lookup).abs())
            })
            .unwrap();
        let est = BaselineEstimator::fit_lrc(&m, &g, &f, crossing).unwrap();
        assert_relative_eq!(lrc_confidence(&est, &m, crossing).unwrap(), 0.5, epsilon = 1e-12);

        let argmax = g
            .iter()
            .chain(&f)
            .copied()
            .max_by(|a, b| {
                m.log_likelihood_ratio(*a, EvalMode::Lookup)
                    .total_cmp(&m.log_likelihood_ratio(*b, EvalMode::Lookup))
            })
            .unwrap();
        assert_relative_eq!(lrc_confidence(&est, &m, argmax).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lrc_monotone_in_llr_for_genuine_decisions() {
        let (m, g, f) = model_and_data();
        let est = BaselineEstimator::fit_lrc(&m, &g, &f, 0.5).unwrap();
        let mut pts: Vec<(f64, f64)> = (0..500)
            .map(|k| 0.5 + k as f64 * 0.001)
            .map(|s| {
                (
                    m.log_likelihood_ratio(s, EvalMode::Lookup),
                    lrc_confidence(&est, &m, s).unwrap(),
                )
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pts.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
        assert!(pts.iter().all(|p| (0.0..=1.0).contains(&p.1)));
    }

    #[test]
    fn erbc_zero_error_extremes() {
        let (_, g, f) = model_and_data();
        let fmax = f.iter().cloned().fold(f64::MIN, f64::max);
        let gmin = g.iter().cloned().fold(f64::MAX, f64::min);
        let est = BaselineEstimator::fit_erbc(&g, &f, 0.45).unwrap();
        assert_eq!(erbc_confidence(&est, fmax + 0.2).unwrap(), 1.0);
        assert_eq!(erbc_confidence(&est, gmin - 0.2).unwrap(), 1.0);
    }

    #[test]
    fn erbc_at_equal_error_point() {
        let (_, g, f) = model_and_data();
        let table = ErrorRateTable::tabulate(&g, &f, ERBC_GRID_SIZE).unwrap();
        let k = (0..ERBC_GRID_SIZE)
            .min_by(|&a, &b| {
                (table.fmr[a] - table.fnmr[a])
                    .abs()
                    .total_cmp(&(table.fmr[b] - table.fnmr[b]).abs())
            })
            .unwrap();
        let s = table.threshold(k);
        let eer = 0.5 * (table.fmr[k] + table.fnmr[k]);
        let below = BaselineEstimator::fit_erbc(&g, &f, s - 0.1).unwrap();
        let above = BaselineEstimator::fit_erbc(&g, &f, s + 0.1).unwrap();
        assert!((erbc_confidence(&below, s).unwrap() - (1.0 - eer)).abs() < 2e-3);
        assert!((erbc_confidence(&above, s).unwrap() - (1.0 - eer)).abs() < 2e-3);
    }

    #[test]
    fn erbc_genuine_confidence_non_decreasing() {
        let (_, g, f) = model_and_data();
        let est = BaselineEstimator::fit_erbc(&g, &f, 0.0).unwrap();
        let mut prev = 0.0;
        for k in 0..2000 {
            let s = k as f64 * 0.001;
            let c = erbc_confidence(&est, s).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn all_estimators_stay_in_unit_interval() {
        let (m, g, f) = model_and_data();
        for kind in [BaselineKind::Dtc, BaselineKind::Lrc, BaselineKind::Erbc] {
            let est = BaselineEstimator::fit(kind, &m, &g, &f, 0.45).unwrap();
            for k in -300..=300 {
                let c = est.confidence(&m, k as f64 * 0.01);
                assert!((0.0..=1.0).contains(&c), "{kind} at {k}: {c}");
            }
        }
    }
}
