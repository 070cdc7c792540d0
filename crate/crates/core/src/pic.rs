//! Probabilistic interpretable comparison (PIC) scores.
//!
//! The PIC score of a set of comparison scores is the posterior probability
//! that they were drawn from the genuine distribution:
//!
//! ```text
//! PIC = L_g P(g) / (L_g P(g) + L_f P(f)),   L_g = prod g(s_i),  L_f = prod f(s_i)
//! ```
//!
//! Products are accumulated as a sum of log-likelihood ratios and mapped
//! through the logistic function, which is algebraically identical and does
//! not underflow for many scores.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::density::{DensityModel, EvalMode};
use crate::error::{PicError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicScore {
    pub value: f64,
    pub n_comparisons: usize,
    /// `sum_i ln(g(s_i) / f(s_i))`, excluding the prior.
    pub log_lr_sum: f64,
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl PicScore {
    fn from_log_lr(log_lr_sum: f64, n_comparisons: usize, prior_log_odds: f64) -> Self {
        PicScore {
            value: sigmoid(log_lr_sum + prior_log_odds),
            n_comparisons,
            log_lr_sum,
        }
    }
}

/// PIC score of a single comparison score (lookup-mode densities).
pub fn pic_single(model: &DensityModel, s: f64) -> PicScore {
    pic_single_with(model, s, EvalMode::Lookup)
}

pub fn pic_single_with(model: &DensityModel, s: f64, mode: EvalMode) -> PicScore {
    PicScore::from_log_lr(
        model.log_likelihood_ratio(s, mode),
        1,
        model.prior_log_odds(),
    )
}

/// Joint PIC score of several comparison scores assumed independent.
pub fn pic_multi(model: &DensityModel, scores: &[f64]) -> Result<PicScore> {
    pic_multi_with(model, scores, EvalMode::Lookup)
}

pub fn pic_multi_with(model: &DensityModel, scores: &[f64], mode: EvalMode) -> Result<PicScore> {
    if scores.is_empty() {
        return Err(PicError::EmptyInput("fusion needs at least one score"));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(PicError::InvalidArgument(format!("score {bad} is not finite")));
    }
    let log_lr_sum = scores
        .iter()
        .map(|&s| model.log_likelihood_ratio(s, mode))
        .sum();
    Ok(PicScore::from_log_lr(
        log_lr_sum,
        scores.len(),
        model.prior_log_odds(),
    ))
}

/// Accept/reject decision plus the probability that it is correct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionConfidence {
    pub decision: Label,
    pub confidence: f64,
}

/// Decides genuine when the PIC value reaches the threshold (inclusive).
/// The confidence is the PIC value for genuine decisions and its complement
/// for imposter decisions.
pub fn decision_confidence(pic: &PicScore, threshold: f64) -> DecisionConfidence {
    decide(pic.value, threshold)
}

pub(crate) fn decide(value: f64, threshold: f64) -> DecisionConfidence {
    if value >= threshold {
        DecisionConfidence {
            decision: Label::Genuine,
            confidence: value,
        }
    } else {
        DecisionConfidence {
            decision: Label::Imposter,
            confidence: 1.0 - value,
        }
    }
}

/// PIC threshold for a target false match rate: `t = 1 - FMR`.
pub fn pic_threshold_for_fmr(target_fmr: f64) -> Result<f64> {
    if target_fmr > 0.0 && target_fmr < 1.0 {
        Ok(1.0 - target_fmr)
    } else {
        Err(PicError::InvalidArgument(format!(
            "target FMR {target_fmr} must lie in (0, 1)"
        )))
    }
}

/// The PIC value of a raw-score threshold. Deciding at this value on the PIC
/// scale reproduces the raw-score decisions wherever the likelihood ratio is
/// monotone.
pub fn pic_threshold_matching_raw(model: &DensityModel, raw_threshold: f64) -> f64 {
    pic_single(model, raw_threshold).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::KdeDensity;
    use approx::assert_relative_eq;

    /// One-point densities at 0 and 1 with unit bandwidth: ln g - ln f at s
    /// is (s - 0.5) exactly, which makes likelihood ratios easy to dial in.
    fn unit_model(prior: f64) -> DensityModel {
        let g = KdeDensity::fit_on_grid(&[1.0], 1.0, -20.0, 21.0, 4097).unwrap();
        let f = KdeDensity::fit_on_grid(&[0.0], 1.0, -20.0, 21.0, 4097).unwrap();
        DensityModel::from_parts(g, f, prior).unwrap()
    }

    fn score_for_lr(lr: f64) -> f64 {
        lr.ln() + 0.5
    }

    #[test]
    fn equal_densities_give_one_half() {
        let m = unit_model(0.5);
        assert_relative_eq!(pic_single_with(&m, 0.5, EvalMode::Exact).value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn reciprocal_ratios_cancel() {
        let m = unit_model(0.5);
        let s = [score_for_lr(3.0), score_for_lr(1.0 / 3.0)];
        let p = pic_multi_with(&m, &s, EvalMode::Exact).unwrap();
        assert_relative_eq!(p.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn three_ratios_of_two() {
        let m = unit_model(0.5);
        let s = [score_for_lr(2.0); 3];
        let p = pic_multi_with(&m, &s, EvalMode::Exact).unwrap();
        // brute force: L_g / (L_g + L_f) with L_g = 8 L_f
        let (lg, lf) = (2.0f64.powi(3), 1.0);
        assert_relative_eq!(p.value, lg / (lg + lf), epsilon = 1e-12);
        assert_relative_eq!(p.value, 8.0 / 9.0, epsilon = 1e-12);
        assert_eq!(p.n_comparisons, 3);
    }

    #[test]
    fn neutral_score_leaves_fusion_unchanged() {
        let m = unit_model(0.5);
        let base = [0.9, 0.1, 1.7];
        let a = pic_multi_with(&m, &base, EvalMode::Exact).unwrap();
        let b = pic_multi_with(&m, &[0.9, 0.1, 1.7, 0.5], EvalMode::Exact).unwrap();
        assert_relative_eq!(a.value, b.value, epsilon = 1e-12);
    }

    #[test]
    fn singleton_fusion_equals_single() {
        let m = unit_model(0.5);
        for s in [-3.0, 0.2, 0.5, 2.0] {
            let a = pic_single(&m, s);
            let b = pic_multi(&m, &[s]).unwrap();
            assert!((a.value - b.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn fusion_rejects_empty_and_nan() {
        let m = unit_model(0.5);
        assert!(pic_multi(&m, &[]).is_err());
        assert!(pic_multi(&m, &[0.1, f64::NAN]).is_err());
    }

    #[test]
    fn value_matches_sigmoid_of_log_lr_and_prior() {
        let m = unit_model(0.2);
        let p = pic_single(&m, 1.3);
        let expected = sigmoid(p.log_lr_sum + (0.2f64 / 0.8).ln());
        assert!((p.value - expected).abs() <= 1e-12);
    }

    #[test]
    fn raising_prior_raises_pic() {
        let lo = unit_model(0.3);
        let hi = unit_model(0.7);
        for s in [-1.0, 0.5, 2.0] {
            assert!(pic_single(&hi, s).value > pic_single(&lo, s).value);
        }
    }

    #[test]
    fn decision_rule() {
        let pic = |v| PicScore {
            value: v,
            n_comparisons: 1,
            log_lr_sum: 0.0,
        };
        let d = decision_confidence(&pic(0.9), 0.5);
        assert_eq!((d.decision, d.confidence), (Label::Genuine, 0.9));
        let d = decision_confidence(&pic(0.2), 0.5);
        assert_eq!(d.decision, Label::Imposter);
        assert_relative_eq!(d.confidence, 0.8, epsilon = 1e-15);
        let d = decision_confidence(&pic(0.5), 0.5);
        assert_eq!(d.decision, Label::Genuine);
    }

    #[test]
    fn threshold_rule() {
        assert_eq!(pic_threshold_for_fmr(1e-3).unwrap(), 0.999);
        assert_eq!(pic_threshold_for_fmr(0.5).unwrap(), 0.5);
        assert!(pic_threshold_for_fmr(0.0).is_err());
        assert!(pic_threshold_for_fmr(1.0).is_err());
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-700.0) > 0.0);
    }
}
