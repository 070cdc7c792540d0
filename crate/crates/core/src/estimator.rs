//! A single interface over PIC and the baseline confidence estimators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineEstimator, BaselineKind};
use crate::dataset::Label;
use crate::density::DensityModel;
use crate::error::Result;
use crate::metrics::threshold_at_fmr;
use crate::pic::{decide, pic_multi, pic_single, pic_threshold_for_fmr, pic_threshold_matching_raw, DecisionConfidence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Pic,
    Dtc,
    Lrc,
    Erbc,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Pic,
        EstimatorKind::Dtc,
        EstimatorKind::Lrc,
        EstimatorKind::Erbc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Pic => "pic",
            EstimatorKind::Dtc => "dtc",
            EstimatorKind::Lrc => "lrc",
            EstimatorKind::Erbc => "erbc",
        }
    }

    fn baseline(self) -> Option<BaselineKind> {
        match self {
            EstimatorKind::Pic => None,
            EstimatorKind::Dtc => Some(BaselineKind::Dtc),
            EstimatorKind::Lrc => Some(BaselineKind::Lrc),
            EstimatorKind::Erbc => Some(BaselineKind::Erbc),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pic" => Ok(EstimatorKind::Pic),
            other => other
                .parse::<BaselineKind>()
                .map(|b| match b {
                    BaselineKind::Dtc => EstimatorKind::Dtc,
                    BaselineKind::Lrc => EstimatorKind::Lrc,
                    BaselineKind::Erbc => EstimatorKind::Erbc,
                })
                .map_err(|_| format!("unknown estimator `{other}`")),
        }
    }
}

/// How the PIC decision threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PicThreshold {
    /// `1 - FMR` on the PIC scale.
    #[default]
    Rule,
    /// The PIC value of the raw-score threshold, so PIC takes the same
    /// decisions as the raw-score estimators.
    Matched,
}

impl FromStr for PicThreshold {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rule" => Ok(PicThreshold::Rule),
            "matched" => Ok(PicThreshold::Matched),
            other => Err(format!("unknown PIC threshold mode `{other}`")),
        }
    }
}

/// A fitted confidence estimator operating at a target FMR.
#[derive(Debug, Clone)]
pub struct ConfidenceEstimator {
    kind: EstimatorKind,
    model: DensityModel,
    raw_threshold: f64,
    pic_threshold: f64,
    baseline: Option<BaselineEstimator>,
}

impl ConfidenceEstimator {
    /// Fits `kind` on the training scores stored in `model`. The raw-score
    /// threshold meets `target_fmr` on the training imposters.
    pub fn fit(
        kind: EstimatorKind,
        model: DensityModel,
        target_fmr: f64,
        pic_mode: PicThreshold,
    ) -> Result<Self> {
        let genuine = model.genuine().train_scores();
        let imposter = model.imposter().train_scores();
        let raw_threshold = threshold_at_fmr(imposter, target_fmr)?.threshold;
        let pic_threshold = match pic_mode {
            PicThreshold::Rule => pic_threshold_for_fmr(target_fmr)?,
            PicThreshold::Matched => pic_threshold_matching_raw(&model, raw_threshold),
        };
        let baseline = match kind.baseline() {
            Some(b) => Some(BaselineEstimator::fit(b, &model, genuine, imposter, raw_threshold)?),
            None => None,
        };
        Ok(ConfidenceEstimator {
            kind,
            model,
            raw_threshold,
            pic_threshold,
            baseline,
        })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn model(&self) -> &DensityModel {
        &self.model
    }

    pub fn raw_threshold(&self) -> f64 {
        self.raw_threshold
    }

    pub fn pic_threshold(&self) -> f64 {
        self.pic_threshold
    }

    /// Decision and its confidence for one comparison score.
    pub fn assess(&self, s: f64) -> DecisionConfidence {
        match &self.baseline {
            None => decide(pic_single(&self.model, s).value, self.pic_threshold),
            Some(b) => DecisionConfidence {
                decision: if b.decides_genuine(s) {
                    Label::Genuine
                } else {
                    Label::Imposter
                },
                confidence: b.confidence(&self.model, s),
            },
        }
    }

    /// PIC decision for several scores of one probe against one claim.
    pub fn assess_fused(&self, scores: &[f64]) -> Result<DecisionConfidence> {
        Ok(decide(pic_multi(&self.model, scores)?.value, self.pic_threshold))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SynthConfig};

    fn model() -> DensityModel {
        let set = generate(&SynthConfig {
            n_genuine: 4000,
            n_imposter: 4000,
            seed: 3,
            ..SynthConfig::default()
        })
        .unwrap();
        DensityModel::fit(&set, 0.5, 2048).unwrap()
    }

    #[test]
    fn parse_kinds() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.as_str().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("svm".parse::<EstimatorKind>().is_err());
        assert_eq!("Matched".parse::<PicThreshold>().unwrap(), PicThreshold::Matched);
    }

    #[test]
    fn pic_rule_threshold() {
        let e = ConfidenceEstimator::fit(EstimatorKind::Pic, model(), 0.01, PicThreshold::Rule).unwrap();
        assert_eq!(e.pic_threshold(), 0.99);
        assert_eq!(e.assess(0.95).decision, Label::Genuine);
        assert_eq!(e.assess(0.1).decision, Label::Imposter);
    }

    #[test]
    fn matched_threshold_reproduces_raw_decisions() {
        let m = model();
        let pic = ConfidenceEstimator::fit(EstimatorKind::Pic, m.clone(), 0.01, PicThreshold::Matched).unwrap();
        let dtc = ConfidenceEstimator::fit(EstimatorKind::Dtc, m, 0.01, PicThreshold::Matched).unwrap();
        for k in 0..400 {
            let s = 0.2 + k as f64 * 0.0015;
            assert_eq!(pic.assess(s).decision, dtc.assess(s).decision, "s = {s}");
        }
    }

    #[test]
    fn confidences_in_unit_interval() {
        let m = model();
        for kind in EstimatorKind::ALL {
            let e = ConfidenceEstimator::fit(kind, m.clone(), 0.001, PicThreshold::Rule).unwrap();
            for k in -100..=200 {
                let c = e.assess(k as f64 * 0.01).confidence;
                assert!((0.0..=1.0).contains(&c), "{kind}: {c}");
            }
        }
    }
}
