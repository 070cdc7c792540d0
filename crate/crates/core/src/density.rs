//! Gaussian kernel density estimates of the genuine and imposter score
//! distributions, tabulated on a uniform grid for fast lookup.
//!
//! The grid holds natural-log densities. They are computed with a
//! log-sum-exp over all training points, so every tabulated value is finite
//! even where the density itself underflows `f64`. Lookups interpolate
//! linearly in the log domain. Densities handed back to callers are floored at
//! [`DENSITY_FLOOR`], and queries outside the grid clamp to the floor.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledScoreSet;
use crate::error::{PicError, Result};

/// Smallest density value ever reported.
pub const DENSITY_FLOOR: f64 = 1e-12;
pub const DEFAULT_RESOLUTION: usize = 4096;
/// Grid padding beyond the data range, in bandwidths.
pub const GRID_PADDING: f64 = 5.0;
pub const MODEL_FORMAT: &str = "picscore-density-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_PRIOR_GENUINE: f64 = 0.5;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal kernel `exp(-x^2 / 2) / sqrt(2 pi)`.
pub fn gaussian_kernel(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Scott's factor `n^(-1/5)` for one-dimensional data.
pub fn scott_bandwidth(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(PicError::InvalidArgument(
            "Scott's rule needs at least one sample".into(),
        ));
    }
    Ok((n as f64).powf(-0.2))
}

/// Default bandwidth: Scott's factor scaled by the sample standard deviation.
/// Falls back to the bare factor when the spread is zero (or n = 1).
pub fn default_bandwidth(scores: &[f64]) -> Result<f64> {
    let factor = scott_bandwidth(scores.len())?;
    let std = sample_std(scores);
    Ok(if std > 0.0 { std * factor } else { factor })
}

fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// How a density is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    /// Sum the kernel over every training score.
    Exact,
    /// Interpolate the tabulated grid.
    #[default]
    Lookup,
}

/// A fitted one-dimensional Gaussian KDE plus its lookup grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeDensity {
    bandwidth: f64,
    grid_min: f64,
    grid_max: f64,
    grid_resolution: usize,
    log_density: Vec<f64>,
    /// Sorted ascending.
    train_scores: Vec<f64>,
}

impl KdeDensity {
    /// Fits a KDE and tabulates it over the data range padded by five
    /// bandwidths on either side.
    pub fn fit(scores: &[f64], bandwidth: Option<f64>, resolution: usize) -> Result<Self> {
        if scores.is_empty() {
            return Err(PicError::EmptyInput("cannot fit a density to no scores"));
        }
        let h = resolve_bandwidth(scores, bandwidth)?;
        let (lo, hi) = padded_range(scores, h);
        Self::fit_on_grid(scores, h, lo, hi, resolution)
    }

    /// Fits a KDE with an explicit bandwidth and grid range.
    pub fn fit_on_grid(
        scores: &[f64],
        bandwidth: f64,
        grid_min: f64,
        grid_max: f64,
        resolution: usize,
    ) -> Result<Self> {
        if scores.is_empty() {
            return Err(PicError::EmptyInput("cannot fit a density to no scores"));
        }
        if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(PicError::InvalidArgument(format!(
                "training score {bad} is not finite"
            )));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(PicError::InvalidArgument(format!(
                "bandwidth {bandwidth} must be positive"
            )));
        }
        if resolution < 2 {
            return Err(PicError::InvalidArgument(format!(
                "grid resolution {resolution} must be at least 2"
            )));
        }
        if !(grid_min < grid_max) || !grid_min.is_finite() || !grid_max.is_finite() {
            return Err(PicError::InvalidArgument(format!(
                "invalid grid range [{grid_min}, {grid_max}]"
            )));
        }
        let mut train_scores = scores.to_vec();
        train_scores.sort_by(f64::total_cmp);

        let mut kde = KdeDensity {
            bandwidth,
            grid_min,
            grid_max,
            grid_resolution: resolution,
            log_density: Vec::new(),
            train_scores,
        };
        let step = kde.grid_step();
        kde.log_density = (0..resolution)
            .into_par_iter()
            .map(|k| kde.exact_log_density(grid_min + k as f64 * step))
            .collect();
        Ok(kde)
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn grid_min(&self) -> f64 {
        self.grid_min
    }

    pub fn grid_max(&self) -> f64 {
        self.grid_max
    }

    pub fn grid_resolution(&self) -> usize {
        self.grid_resolution
    }

    pub fn grid_step(&self) -> f64 {
        (self.grid_max - self.grid_min) / (self.grid_resolution - 1) as f64
    }

    pub fn grid_point(&self, k: usize) -> f64 {
        self.grid_min + k as f64 * self.grid_step()
    }

    pub fn train_scores(&self) -> &[f64] {
        &self.train_scores
    }

    /// Tabulated natural-log densities.
    pub fn log_grid_values(&self) -> &[f64] {
        &self.log_density
    }

    /// Tabulated densities, floored at [`DENSITY_FLOOR`].
    pub fn grid_values(&self) -> Vec<f64> {
        self.log_density.iter().map(|&l| floor_density(l)).collect()
    }

    /// Trapezoidal integral of the tabulated density over the grid.
    pub fn grid_integral(&self) -> f64 {
        let v = self.grid_values();
        let step = self.grid_step();
        v.windows(2).map(|w| 0.5 * (w[0] + w[1]) * step).sum()
    }

    /// `ln` of the KDE summed over all training points. Finite for any finite
    /// `s`, since the largest kernel term is factored out before summing.
    pub fn exact_log_density(&self, s: f64) -> f64 {
        let h = self.bandwidth;
        let xs = &self.train_scores;
        let idx = xs.partition_point(|&x| x < s);
        let nearest = [idx.checked_sub(1), (idx < xs.len()).then_some(idx)]
            .into_iter()
            .flatten()
            .map(|i| ((s - xs[i]) / h).abs())
            .fold(f64::INFINITY, f64::min);
        let offset = 0.5 * nearest * nearest;
        let sum: f64 = xs
            .iter()
            .map(|&x| {
                let z = (s - x) / h;
                (offset - 0.5 * z * z).exp()
            })
            .sum();
        sum.ln() - offset - (xs.len() as f64 * h).ln() - LN_SQRT_2PI
    }

    /// `ln` of the density. In lookup mode, queries outside the grid return
    /// `ln(DENSITY_FLOOR)`; inside, the log grid is interpolated linearly and
    /// grid points return their stored value exactly.
    pub fn log_density(&self, s: f64, mode: EvalMode) -> f64 {
        match mode {
            EvalMode::Exact => self.exact_log_density(s),
            EvalMode::Lookup => self.lookup_log_density(s),
        }
    }

    /// Density at `s`, never below [`DENSITY_FLOOR`].
    pub fn density(&self, s: f64, mode: EvalMode) -> f64 {
        floor_density(self.log_density(s, mode))
    }

    fn lookup_log_density(&self, s: f64) -> f64 {
        if !(s >= self.grid_min && s <= self.grid_max) {
            return DENSITY_FLOOR.ln();
        }
        let t = (s - self.grid_min) / self.grid_step();
        let nearest = t.round();
        let last = self.grid_resolution - 1;
        if (t - nearest).abs() < 1e-9 {
            return self.log_density[(nearest as usize).min(last)];
        }
        let i = (t.floor() as usize).min(last - 1);
        let frac = t - i as f64;
        let a = self.log_density[i];
        let b = self.log_density[i + 1];
        a + (b - a) * frac
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PicError::InvalidModel(m));
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return bad(format!("bandwidth {} must be positive", self.bandwidth));
        }
        if self.grid_resolution < 2 || self.log_density.len() != self.grid_resolution {
            return bad(format!(
                "grid has {} values but resolution {}",
                self.log_density.len(),
                self.grid_resolution
            ));
        }
        if !(self.grid_min < self.grid_max) {
            return bad(format!(
                "invalid grid range [{}, {}]",
                self.grid_min, self.grid_max
            ));
        }
        if self.train_scores.is_empty() {
            return bad("density has no training scores".into());
        }
        if self.log_density.iter().any(|v| !v.is_finite()) {
            return bad("non-finite grid value".into());
        }
        Ok(())
    }
}

fn floor_density(log_density: f64) -> f64 {
    if log_density <= DENSITY_FLOOR.ln() {
        DENSITY_FLOOR
    } else {
        log_density.exp().max(DENSITY_FLOOR)
    }
}

fn resolve_bandwidth(scores: &[f64], bandwidth: Option<f64>) -> Result<f64> {
    match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => Ok(h),
        Some(h) => Err(PicError::InvalidArgument(format!(
            "bandwidth {h} must be positive"
        ))),
        None => default_bandwidth(scores),
    }
}

fn padded_range(scores: &[f64], h: f64) -> (f64, f64) {
    let (lo, hi) = scores
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
    (lo - GRID_PADDING * h, hi + GRID_PADDING * h)
}

/// Fits a single density with the default bandwidth and resolution.
pub fn fit_kde(scores: &[f64], bandwidth: Option<f64>) -> Result<KdeDensity> {
    KdeDensity::fit(scores, bandwidth, DEFAULT_RESOLUTION)
}

/// Genuine and imposter densities over a shared grid, plus the genuine prior.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityModel {
    genuine: KdeDensity,
    imposter: KdeDensity,
    prior_genuine: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    prior_genuine: f64,
    genuine: KdeDensity,
    imposter: KdeDensity,
}

impl DensityModel {
    /// Fits both class densities with their default bandwidths on one grid
    /// spanning the union of the two padded data ranges.
    pub fn fit(train: &LabeledScoreSet, prior_genuine: f64, resolution: usize) -> Result<Self> {
        Self::fit_scores(
            train.genuine_scores(),
            train.imposter_scores(),
            prior_genuine,
            resolution,
        )
    }

    pub fn fit_scores(
        genuine: &[f64],
        imposter: &[f64],
        prior_genuine: f64,
        resolution: usize,
    ) -> Result<Self> {
        if genuine.is_empty() {
            return Err(PicError::EmptyClass { class: "genuine" });
        }
        if imposter.is_empty() {
            return Err(PicError::EmptyClass { class: "imposter" });
        }
        check_prior(prior_genuine)?;
        let hg = default_bandwidth(genuine)?;
        let hf = default_bandwidth(imposter)?;
        let (glo, ghi) = padded_range(genuine, hg);
        let (flo, fhi) = padded_range(imposter, hf);
        let (lo, hi) = (glo.min(flo), ghi.max(fhi));
        Ok(DensityModel {
            genuine: KdeDensity::fit_on_grid(genuine, hg, lo, hi, resolution)?,
            imposter: KdeDensity::fit_on_grid(imposter, hf, lo, hi, resolution)?,
            prior_genuine,
        })
    }

    pub fn from_parts(
        genuine: KdeDensity,
        imposter: KdeDensity,
        prior_genuine: f64,
    ) -> Result<Self> {
        check_prior(prior_genuine)?;
        Ok(DensityModel {
            genuine,
            imposter,
            prior_genuine,
        })
    }

    pub fn genuine(&self) -> &KdeDensity {
        &self.genuine
    }

    pub fn imposter(&self) -> &KdeDensity {
        &self.imposter
    }

    pub fn prior_genuine(&self) -> f64 {
        self.prior_genuine
    }

    pub fn prior_imposter(&self) -> f64 {
        1.0 - self.prior_genuine
    }

    pub fn version(&self) -> u32 {
        MODEL_FORMAT_VERSION
    }

    /// `ln(P(g) / P(f))`.
    pub fn prior_log_odds(&self) -> f64 {
        (self.prior_genuine / self.prior_imposter()).ln()
    }

    /// `ln g(s) - ln f(s)`.
    pub fn log_likelihood_ratio(&self, s: f64, mode: EvalMode) -> f64 {
        self.genuine.log_density(s, mode) - self.imposter.log_density(s, mode)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_FORMAT_VERSION,
            prior_genuine: self.prior_genuine,
            genuine: self.genuine.clone(),
            imposter: self.imposter.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("version") {
            Some(v) if v.as_u64() == Some(MODEL_FORMAT_VERSION as u64) => {}
            Some(v) => {
                return Err(PicError::UnsupportedVersion {
                    found: v.to_string(),
                    expected: MODEL_FORMAT_VERSION,
                })
            }
            None => return Err(PicError::InvalidModel("missing `version` field".into())),
        }
        let file: ModelFile = serde_json::from_value(value)?;
        if file.format != MODEL_FORMAT {
            return Err(PicError::InvalidModel(format!(
                "unexpected format tag `{}`",
                file.format
            )));
        }
        file.genuine.validate()?;
        file.imposter.validate()?;
        Self::from_parts(file.genuine, file.imposter, file.prior_genuine)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| PicError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PicError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Fits a [`DensityModel`] on a labeled training set.
pub fn fit_model(
    train: &LabeledScoreSet,
    prior_genuine: f64,
    resolution: usize,
) -> Result<DensityModel> {
    DensityModel::fit(train, prior_genuine, resolution)
}

pub fn save_model(model: &DensityModel, path: impl AsRef<Path>) -> Result<()> {
    model.save(path)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<DensityModel> {
    DensityModel::load(path)
}

fn check_prior(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(PicError::InvalidArgument(format!(
            "genuine prior {p} must lie in (0, 1)"
        )))
    }
}
