//! Verification error rates and calibration metrics.
//!
//! A comparison is accepted as a match when its score reaches the threshold:
//! FMR(t) counts imposter scores `>= t`, FNMR(t) counts genuine scores `< t`.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::density::DensityModel;
use crate::error::{PicError, Result};
use crate::pic::pic_single;

pub const DEFAULT_ECE_BINS: usize = 10;
pub const DEFAULT_CCC_BINS: usize = 30;

pub fn false_match_rate(imposter: &[f64], threshold: f64) -> f64 {
    if imposter.is_empty() {
        return 0.0;
    }
    imposter.iter().filter(|&&s| s >= threshold).count() as f64 / imposter.len() as f64
}

pub fn false_non_match_rate(genuine: &[f64], threshold: f64) -> f64 {
    if genuine.is_empty() {
        return 0.0;
    }
    genuine.iter().filter(|&&s| s < threshold).count() as f64 / genuine.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FmrThreshold {
    pub threshold: f64,
    /// FMR actually achieved at `threshold` on the given imposters.
    pub fmr: f64,
    /// Set when no observed score meets the target, in which case the
    /// threshold sits just above the largest imposter score.
    pub saturated: bool,
}

/// Smallest observed imposter score `t` with `FMR(t) <= target`.
///
/// Computed exactly from the sorted scores. When the target admits fewer than
/// one imposter (or ties at the top prevent it), returns the next float above
/// the maximum score and flags the result as saturated.
pub fn threshold_at_fmr(imposter: &[f64], target_fmr: f64) -> Result<FmrThreshold> {
    if imposter.is_empty() {
        return Err(PicError::EmptyInput("no imposter scores"));
    }
    if !(target_fmr > 0.0 && target_fmr < 1.0) {
        return Err(PicError::InvalidArgument(format!(
            "target FMR {target_fmr} must lie in (0, 1)"
        )));
    }
    if let Some(bad) = imposter.iter().find(|s| !s.is_finite()) {
        return Err(PicError::InvalidArgument(format!("imposter score {bad} is not finite")));
    }
    let n = imposter.len();
    let mut desc = imposter.to_vec();
    desc.sort_by(|a, b| b.total_cmp(a));

    // Number of imposters allowed at or above the threshold.
    let allowed = ((target_fmr * n as f64) + 1e-9).floor() as usize;
    let saturated = || FmrThreshold {
        threshold: desc[0].next_up(),
        fmr: 0.0,
        saturated: true,
    };
    if allowed == 0 {
        return Ok(saturated());
    }
    if allowed >= n {
        let t = desc[n - 1];
        return Ok(FmrThreshold {
            threshold: t,
            fmr: 1.0,
            saturated: false,
        });
    }
    // Every threshold at or below the (allowed+1)-th largest score accepts too
    // many, so step up to the next strictly larger observed value.
    let excluded = desc[allowed];
    let first_excluded = desc.partition_point(|&s| s > excluded);
    if first_excluded == 0 {
        return Ok(saturated());
    }
    let t = desc[first_excluded - 1];
    Ok(FmrThreshold {
        threshold: t,
        fmr: first_excluded as f64 / n as f64,
        saturated: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub threshold: f64,
    pub fmr: f64,
    pub fnmr: f64,
    pub n_genuine: usize,
    pub n_imposter: usize,
    pub saturated: bool,
}

/// FNMR at the threshold that achieves the target FMR on the imposters.
pub fn fnmr_at_fmr(genuine: &[f64], imposter: &[f64], target_fmr: f64) -> Result<VerificationResult> {
    if genuine.is_empty() {
        return Err(PicError::EmptyInput("no genuine scores"));
    }
    let t = threshold_at_fmr(imposter, target_fmr)?;
    Ok(VerificationResult {
        threshold: t.threshold,
        fmr: t.fmr,
        fnmr: false_non_match_rate(genuine, t.threshold),
        n_genuine: genuine.len(),
        n_imposter: imposter.len(),
        saturated: t.saturated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Fraction of correct decisions; NaN for an empty bin.
    pub p_true: f64,
    pub p_pred_mean: f64,
    pub p_pred_std: f64,
}

impl CalibrationBin {
    pub fn gap(&self) -> f64 {
        (self.p_true - self.p_pred_mean).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub bins: Vec<CalibrationBin>,
    pub ece: f64,
    pub mce: f64,
    pub n_bins: usize,
    pub n_samples: usize,
}

/// Index of the equal-width bin over `[0, 1]` holding `x`; 1.0 falls into
/// the last bin.
fn bin_index(x: f64, bins: usize) -> usize {
    ((x * bins as f64).floor() as usize).min(bins - 1)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn check_unit_interval(xs: &[f64]) -> Result<()> {
    match xs.iter().position(|&c| !(0.0..=1.0).contains(&c)) {
        Some(index) => Err(PicError::ConfidenceOutOfRange {
            index,
            value: xs[index],
        }),
        None => Ok(()),
    }
}

/// Bins predictions by confidence into `m_bins` equal-width bins and compares
/// mean confidence with the fraction of correct decisions per bin.
pub fn calibration_report(
    confidences: &[f64],
    correct: &[bool],
    m_bins: usize,
) -> Result<CalibrationReport> {
    if confidences.len() != correct.len() {
        return Err(PicError::LengthMismatch {
            left: confidences.len(),
            right: correct.len(),
        });
    }
    if confidences.is_empty() {
        return Err(PicError::EmptyInput("no predictions to calibrate"));
    }
    if m_bins == 0 {
        return Err(PicError::InvalidArgument("bin count must be positive".into()));
    }
    check_unit_interval(confidences)?;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m_bins];
    for (i, &c) in confidences.iter().enumerate() {
        members[bin_index(c, m_bins)].push(i);
    }
    let n = confidences.len();
    let mut weighted_gap = 0.0;
    let mut mce: f64 = 0.0;
    let bins: Vec<CalibrationBin> = members
        .iter()
        .enumerate()
        .map(|(m, idx)| {
            let preds: Vec<f64> = idx.iter().map(|&i| confidences[i]).collect();
            let (p_pred_mean, p_pred_std) = mean_std(&preds);
            let p_true = if idx.is_empty() {
                f64::NAN
            } else {
                idx.iter().filter(|&&i| correct[i]).count() as f64 / idx.len() as f64
            };
            let bin = CalibrationBin {
                lo: m as f64 / m_bins as f64,
                hi: (m + 1) as f64 / m_bins as f64,
                count: idx.len(),
                p_true,
                p_pred_mean,
                p_pred_std,
            };
            if bin.count > 0 {
                weighted_gap += bin.count as f64 * bin.gap();
                mce = mce.max(bin.gap());
            }
            bin
        })
        .collect();
    // A weighted mean never exceeds the max; min() only absorbs rounding.
    let ece = (weighted_gap / n as f64).min(mce);
    Ok(CalibrationReport {
        bins,
        ece,
        mce,
        n_bins: m_bins,
        n_samples: n,
    })
}

/// Expected calibration error.
pub fn ece(confidences: &[f64], correct: &[bool], m_bins: usize) -> Result<f64> {
    Ok(calibration_report(confidences, correct, m_bins)?.ece)
}

/// Maximum calibration error over non-empty bins.
pub fn mce(confidences: &[f64], correct: &[bool], m_bins: usize) -> Result<f64> {
    Ok(calibration_report(confidences, correct, m_bins)?.mce)
}

/// One point of a confidence calibration curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CccPoint {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub bin_center: f64,
    /// NaN for an empty bin.
    pub pred_mean: f64,
    pub pred_std: f64,
    pub count: usize,
}

/// Confidence calibration curve: samples binned by their true confidence,
/// with mean and standard deviation of the predicted confidence per bin.
pub fn ccc(true_conf: &[f64], pred_conf: &[f64], b_bins: usize) -> Result<Vec<CccPoint>> {
    if true_conf.len() != pred_conf.len() {
        return Err(PicError::LengthMismatch {
            left: true_conf.len(),
            right: pred_conf.len(),
        });
    }
    if b_bins == 0 {
        return Err(PicError::InvalidArgument("bin count must be positive".into()));
    }
    check_unit_interval(true_conf)?;
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); b_bins];
    for (&t, &p) in true_conf.iter().zip(pred_conf) {
        members[bin_index(t, b_bins)].push(p);
    }
    Ok(members
        .iter()
        .enumerate()
        .map(|(m, preds)| {
            let lo = m as f64 / b_bins as f64;
            let hi = (m + 1) as f64 / b_bins as f64;
            let (pred_mean, pred_std) = mean_std(preds);
            CccPoint {
                bin_lo: lo,
                bin_hi: hi,
                bin_center: 0.5 * (lo + hi),
                pred_mean,
                pred_std,
                count: preds.len(),
            }
        })
        .collect())
}

/// Probability that `decision` is correct for score `s`, under a model fitted
/// on test data.
pub fn true_confidence_for_decision(model_test: &DensityModel, s: f64, decision: Label) -> f64 {
    let p = pic_single(model_test, s).value;
    match decision {
        Label::Genuine => p,
        Label::Imposter => 1.0 - p,
    }
}

/// As [`true_confidence_for_decision`], with the decision taken at a raw-score
/// threshold (`s >= threshold` decides genuine).
pub fn true_confidence(model_test: &DensityModel, s: f64, threshold: f64) -> f64 {
    let decision = if s >= threshold {
        Label::Genuine
    } else {
        Label::Imposter
    };
    true_confidence_for_decision(model_test, s, decision)
}
