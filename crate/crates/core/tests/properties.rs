mod common;

use std::sync::OnceLock;

use picscore::baselines::{BaselineEstimator, BaselineKind};
use picscore::dataset::{split_subject_exclusive, ComparisonRecord, Label};
use picscore::density::EvalMode;
use picscore::metrics::{calibration_report, ece, false_match_rate, threshold_at_fmr};
use picscore::pic::{pic_multi, pic_multi_with, pic_single};
use picscore::synth::{generate, SynthConfig};
use picscore::DensityModel;
use proptest::prelude::*;

fn model() -> &'static DensityModel {
    static MODEL: OnceLock<DensityModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let set = generate(&SynthConfig {
            n_genuine: 3000,
            n_imposter: 3000,
            seed: 17,
            ..SynthConfig::default()
        })
        .unwrap();
        DensityModel::fit(&set, 0.5, 2048).unwrap()
    })
}

proptest! {
    #[test]
    fn pic_is_a_probability(s in -1e6f64..1e6) {
        let p = pic_single(model(), s).value;
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn fusion_ignores_order(mut scores in prop::collection::vec(-0.5f64..1.5, 1..40), seed in any::<u64>()) {
        let a = pic_multi(model(), &scores).unwrap();
        let k = (seed as usize) % scores.len();
        scores.rotate_left(k);
        scores.reverse();
        let b = pic_multi(model(), &scores).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-12);
    }

    #[test]
    fn singleton_fusion_is_single(s in -0.5f64..1.5) {
        let a = pic_single(model(), s).value;
        let b = pic_multi(model(), &[s]).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12);
    }

    // Kept where both densities are well above the reporting floor.
    #[test]
    fn log_space_matches_naive_product(scores in prop::collection::vec(0.3f64..0.6, 1..=5)) {
        let m = model();
        let p = pic_multi_with(m, &scores, EvalMode::Exact).unwrap().value;
        let lg: f64 = scores.iter().map(|&s| m.genuine().density(s, EvalMode::Exact)).product();
        let lf: f64 = scores.iter().map(|&s| m.imposter().density(s, EvalMode::Exact)).product();
        let naive = lg * m.prior_genuine() / (lg * m.prior_genuine() + lf * m.prior_imposter());
        prop_assert!((p - naive).abs() <= 1e-9, "{} vs {}", p, naive);
    }

    #[test]
    fn mce_bounds_ece(
        pairs in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..300),
        bins in 1usize..30,
    ) {
        let (conf, correct): (Vec<f64>, Vec<bool>) = pairs.into_iter().unzip();
        let r = calibration_report(&conf, &correct, bins).unwrap();
        prop_assert!(r.mce >= r.ece);
        prop_assert!(r.ece >= 0.0 && r.mce <= 1.0);
    }

    #[test]
    fn ece_ignores_sample_order(
        pairs in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..300),
        bins in 1usize..30,
    ) {
        let (conf, correct): (Vec<f64>, Vec<bool>) = pairs.iter().cloned().unzip();
        let (rc, rk): (Vec<f64>, Vec<bool>) = pairs.into_iter().rev().unzip();
        let a = ece(&conf, &correct, bins).unwrap();
        let b = ece(&rc, &rk, bins).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn threshold_meets_target_and_is_smallest(
        imposter in prop::collection::vec((0u32..50).prop_map(|k| k as f64 / 10.0), 1..200),
        target in 0.001f64..0.999,
    ) {
        let t = threshold_at_fmr(&imposter, target).unwrap();
        prop_assert!(false_match_rate(&imposter, t.threshold) <= target);
        prop_assert_eq!(t.fmr, false_match_rate(&imposter, t.threshold));
        for &s in &imposter {
            if s < t.threshold {
                prop_assert!(false_match_rate(&imposter, s) > target);
            }
        }
    }

    #[test]
    fn split_is_subject_exclusive(
        pairs in prop::collection::vec((0usize..12, 0usize..12, -1.0f64..1.0), 2..200),
        fraction in 0.1f64..0.9,
        seed in any::<u64>(),
    ) {
        let records: Vec<ComparisonRecord> = pairs
            .iter()
            .map(|&(a, b, s)| {
                let label = if a == b { Label::Genuine } else { Label::Imposter };
                ComparisonRecord::new(s, label).with_subjects(format!("s{a}"), format!("s{b}"))
            })
            .collect();
        let subjects: std::collections::BTreeSet<_> =
            pairs.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        prop_assume!(subjects.len() >= 2);
        let out = split_subject_exclusive(&records, fraction, seed).unwrap();
        prop_assert!(out.train_subjects.is_disjoint(&out.test_subjects));
        prop_assert_eq!(out.train.len() + out.test.len() + out.dropped, records.len());
        for r in out.train.records() {
            prop_assert!(out.train_subjects.contains(r.subject_a.as_deref().unwrap()));
            prop_assert!(out.train_subjects.contains(r.subject_b.as_deref().unwrap()));
        }
        for r in out.test.records() {
            prop_assert!(out.test_subjects.contains(r.subject_a.as_deref().unwrap()));
            prop_assert!(out.test_subjects.contains(r.subject_b.as_deref().unwrap()));
        }
    }

    #[test]
    fn baseline_confidence_in_unit_interval(s in -5.0f64..5.0, t in 0.0f64..1.0) {
        let m = model();
        let (g, f) = (m.genuine().train_scores(), m.imposter().train_scores());
        for kind in [BaselineKind::Dtc, BaselineKind::Lrc, BaselineKind::Erbc] {
            let est = BaselineEstimator::fit(kind, m, g, f, t).unwrap();
            let c = est.confidence(m, s);
            prop_assert!((0.0..=1.0).contains(&c), "{} {}", kind, c);
        }
    }

    #[test]
    fn fast_kendall_matches_brute_force(
        pts in prop::collection::vec(((0u32..8).prop_map(f64::from), (0u32..8).prop_map(f64::from)), 2..60),
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        prop_assert_eq!(common::kendall_counts(&x, &y), common::kendall_counts_brute(&x, &y));
    }
}

#[test]
fn kendall_of_identical_rankings_is_one() {
    let x: Vec<f64> = (0..100).map(f64::from).collect();
    let y: Vec<f64> = x.iter().map(|v| v * v).collect();
    assert_eq!(common::kendall_tau_b(&x, &y), 1.0);
    let rev: Vec<f64> = x.iter().map(|v| -v).collect();
    assert_eq!(common::kendall_tau_b(&x, &rev), -1.0);
}
