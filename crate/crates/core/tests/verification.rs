use picscore::dataset::split_subject_exclusive;
use picscore::estimator::{ConfidenceEstimator, EstimatorKind, PicThreshold};
use picscore::metrics::{fnmr_at_fmr, true_confidence_for_decision};
use picscore::synth::{generate, SynthConfig};
use picscore::DensityModel;
use statrs::distribution::{ContinuousCDF, Normal};

#[test]
fn fnmr_matches_gaussian_tail_prediction() {
    let cfg = SynthConfig {
        n_genuine: 200_000,
        n_imposter: 200_000,
        seed: 31,
        ..SynthConfig::default()
    };
    let set = generate(&cfg).unwrap();
    let v = fnmr_at_fmr(set.genuine_scores(), set.imposter_scores(), 1e-3).unwrap();
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let t = cfg.imposter_mean + cfg.imposter_std * std_normal.inverse_cdf(1.0 - 1e-3);
    let predicted = std_normal.cdf((t - cfg.genuine_mean) / cfg.genuine_std);
    assert!(
        (v.fnmr - predicted).abs() / predicted < 0.2,
        "fnmr {} vs {predicted}",
        v.fnmr
    );
    assert!(v.fmr <= 1e-3);
}

#[test]
fn identical_distributions_give_complementary_fnmr() {
    let set = generate(&SynthConfig {
        genuine_mean: 0.2 + 1e-12,
        n_genuine: 100_000,
        n_imposter: 100_000,
        seed: 32,
        ..SynthConfig::default()
    })
    .unwrap();
    let v = fnmr_at_fmr(set.genuine_scores(), set.imposter_scores(), 0.1).unwrap();
    assert!((v.fnmr - 0.9).abs() < 0.01, "{}", v.fnmr);
}

#[test]
fn split_train_test_pipeline_is_calibrated() {
    let all = generate(&SynthConfig {
        n_genuine: 40_000,
        n_imposter: 40_000,
        seed: 33,
        ..SynthConfig::default()
    })
    .unwrap();
    let split = split_subject_exclusive(all.records(), 0.5, 34).unwrap();
    let model = DensityModel::fit(&split.train, 0.5, 4096).unwrap();
    let test_model = DensityModel::fit(&split.test, 0.5, 4096).unwrap();
    let est = ConfidenceEstimator::fit(EstimatorKind::Pic, model, 1e-3, PicThreshold::Rule).unwrap();
    // Predicted confidence tracks the confidence implied by the test densities.
    let mut total = 0.0;
    for r in split.test.records() {
        let d = est.assess(r.score);
        total += (d.confidence - true_confidence_for_decision(&test_model, r.score, d.decision)).abs();
    }
    let mad = total / split.test.len() as f64;
    assert!(mad < 0.01, "{mad}");
}
