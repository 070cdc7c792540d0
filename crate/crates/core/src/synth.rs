//! Synthetic genuine/imposter scores drawn from two normal distributions, with
//! the exact Bayes posterior available in closed form as an oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{ComparisonRecord, Label, LabeledScoreSet};
use crate::error::{PicError, Result};
use crate::pic::sigmoid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub genuine_mean: f64,
    pub genuine_std: f64,
    pub imposter_mean: f64,
    pub imposter_std: f64,
    pub n_genuine: usize,
    pub n_imposter: usize,
    pub seed: u64,
    /// Number of synthetic identities, assigned round-robin.
    pub n_subjects: usize,
    /// Consecutive records sharing one probe and one claimed identity.
    pub refs_per_probe: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            genuine_mean: 0.7,
            genuine_std: 0.1,
            imposter_mean: 0.2,
            imposter_std: 0.1,
            n_genuine: 50_000,
            n_imposter: 50_000,
            seed: 0,
            n_subjects: 100,
            refs_per_probe: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PicError::InvalidArgument(m));
        for (name, v) in [
            ("genuine_std", self.genuine_std),
            ("imposter_std", self.imposter_std),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} {v} must be positive"));
            }
        }
        if !(self.genuine_mean.is_finite() && self.imposter_mean.is_finite()) {
            return bad("means must be finite".into());
        }
        if self.genuine_mean <= self.imposter_mean {
            return bad(format!(
                "genuine mean {} must exceed imposter mean {}",
                self.genuine_mean, self.imposter_mean
            ));
        }
        if self.n_genuine == 0 || self.n_imposter == 0 {
            return bad("both classes need at least one score".into());
        }
        if self.n_subjects < 2 {
            return bad("at least two subjects are needed".into());
        }
        if self.refs_per_probe == 0 {
            return bad("refs_per_probe must be positive".into());
        }
        Ok(())
    }

    fn log_pdf(x: f64, mean: f64, std: f64) -> f64 {
        let z = (x - mean) / std;
        -0.5 * z * z - std.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }

    /// `ln g(s) - ln f(s)` under the true normal densities.
    pub fn log_likelihood_ratio(&self, s: f64) -> f64 {
        Self::log_pdf(s, self.genuine_mean, self.genuine_std)
            - Self::log_pdf(s, self.imposter_mean, self.imposter_std)
    }
}

fn subject(k: usize) -> String {
    format!("S{k:04}")
}

/// Draws the configured genuine scores followed by the imposter scores.
///
/// Records come in groups of `refs_per_probe` that share a probe id and a
/// claimed identity (`subject_b`). Genuine groups cycle through the subjects;
/// imposter groups pair each subject with a different one.
pub fn generate(config: &SynthConfig) -> Result<LabeledScoreSet> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gen = Normal::new(config.genuine_mean, config.genuine_std)
        .map_err(|e| PicError::InvalidArgument(e.to_string()))?;
    let imp = Normal::new(config.imposter_mean, config.imposter_std)
        .map_err(|e| PicError::InvalidArgument(e.to_string()))?;
    let k = config.n_subjects;
    let r = config.refs_per_probe;

    let mut records = Vec::with_capacity(config.n_genuine + config.n_imposter);
    for i in 0..config.n_genuine {
        let (group, j) = (i / r, i % r);
        let s = subject(group % k);
        records.push(
            ComparisonRecord::new(gen.sample(&mut rng), Label::Genuine)
                .with_ids(format!("gp{group}"), format!("gp{group}-r{j}"))
                .with_subjects(s.clone(), s),
        );
    }
    for i in 0..config.n_imposter {
        let (group, j) = (i / r, i % r);
        let a = group % k;
        let b = (a + 1 + (group / k) % (k - 1)) % k;
        records.push(
            ComparisonRecord::new(imp.sample(&mut rng), Label::Imposter)
                .with_ids(format!("ip{group}"), format!("ip{group}-r{j}"))
                .with_subjects(subject(a), subject(b)),
        );
    }
    Ok(LabeledScoreSet::new(records))
}

fn prior_log_odds(prior_genuine: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&prior_genuine) {
        Ok((prior_genuine / (1.0 - prior_genuine)).ln())
    } else {
        Err(PicError::InvalidArgument(format!(
            "genuine prior {prior_genuine} must lie in [0, 1]"
        )))
    }
}

/// Exact posterior probability that `s` is a genuine score.
pub fn analytic_posterior(config: &SynthConfig, s: f64, prior_genuine: f64) -> Result<f64> {
    Ok(sigmoid(config.log_likelihood_ratio(s) + prior_log_odds(prior_genuine)?))
}

/// Exact posterior for independent scores sharing one class.
pub fn analytic_fused_posterior(
    config: &SynthConfig,
    scores: &[f64],
    prior_genuine: f64,
) -> Result<f64> {
    if scores.is_empty() {
        return Err(PicError::EmptyInput("fusion needs at least one score"));
    }
    let llr: f64 = scores.iter().map(|&s| config.log_likelihood_ratio(s)).sum();
    Ok(sigmoid(llr + prior_log_odds(prior_genuine)?))
}
