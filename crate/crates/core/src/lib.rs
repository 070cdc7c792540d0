//! Calibrated confidence for biometric verification decisions.
//!
//! Comparison scores are turned into PIC scores, the posterior probability
//! that a score (or a set of scores) came from a genuine comparison, using
//! kernel density estimates of the genuine and imposter score distributions.

pub mod baselines;
pub mod cli;
pub mod dataset;
pub mod density;
pub mod error;
pub mod estimator;
pub mod metrics;
pub mod pic;
pub mod synth;

pub use baselines::{BaselineEstimator, BaselineKind};
pub use dataset::{
    load_scores, save_scores, split_subject_exclusive, ComparisonRecord, Label, LabeledScoreSet,
    SplitOutcome,
};
pub use density::{fit_kde, fit_model, load_model, save_model, DensityModel, EvalMode, KdeDensity};
pub use error::{PicError, Result};
pub use estimator::{ConfidenceEstimator, EstimatorKind, PicThreshold};
pub use metrics::{
    ccc, ece, fnmr_at_fmr, mce, threshold_at_fmr, CalibrationReport, VerificationResult,
};
pub use pic::{decision_confidence, pic_multi, pic_single, DecisionConfidence, PicScore};
pub use synth::{analytic_fused_posterior, analytic_posterior, generate, SynthConfig};
