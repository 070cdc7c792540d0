//! Command-line front end: split, train, score, fuse, eval, curve, synth.
//!
//! Every command writes `<output>.manifest.json` recording its inputs,
//! outputs and settings. Numbers in CSV output carry six fractional digits;
//! empty calibration bins are written as `NaN`.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dataset::{
    load_scores, record_fields, save_scores, split_subject_exclusive, Label, SCORE_COLUMNS,
};
use crate::density::{DensityModel, DEFAULT_PRIOR_GENUINE, DEFAULT_RESOLUTION};
use crate::error::{PicError, Result};
use crate::estimator::{ConfidenceEstimator, EstimatorKind, PicThreshold};
use crate::metrics::{
    calibration_report, ccc, fnmr_at_fmr, true_confidence_for_decision, DEFAULT_CCC_BINS,
    DEFAULT_ECE_BINS,
};
use crate::pic::pic_single;
use crate::synth::{generate, SynthConfig};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "picscore", version, about = "Calibrated confidence for biometric comparison scores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Subject-exclusive train/test split of a score CSV.
    Split(SplitArgs),
    /// Fit genuine and imposter densities and save the model.
    Train(TrainArgs),
    /// Append PIC score, decision and confidence to every record.
    Score(ScoreArgs),
    /// Joint PIC score per (probe, claimed identity) group.
    Fuse(FuseArgs),
    /// Calibration report and error rates for a confidence estimator.
    Eval(EvalArgs),
    /// Confidence calibration curve against a model fitted on test data.
    Curve(CurveArgs),
    /// Generate synthetic normal scores.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Target share of genuine comparisons on the training side.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_train: PathBuf,
    #[arg(long)]
    pub out_test: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PRIOR_GENUINE)]
    pub prior: f64,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    pub fmr: f64,
    /// `rule` decides at 1 - FMR; `matched` at the PIC value of the raw-score threshold.
    #[arg(long, default_value = "rule")]
    pub pic_threshold: PicThreshold,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Scores used per group, taken in file order.
    #[arg(long, default_value_t = 5)]
    pub max_refs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub fmr: f64,
    #[arg(long, default_value = "rule")]
    pub pic_threshold: PicThreshold,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecisionFilter {
    All,
    Genuine,
    Imposter,
}

impl DecisionFilter {
    fn keeps(self, d: Label) -> bool {
        match self {
            DecisionFilter::All => true,
            DecisionFilter::Genuine => d == Label::Genuine,
            DecisionFilter::Imposter => d == Label::Imposter,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            DecisionFilter::All => "all",
            DecisionFilter::Genuine => "genuine",
            DecisionFilter::Imposter => "imposter",
        }
    }
}

/// Where decisions and confidences come from. PIC reads the `decision` and
/// `confidence` columns when present; otherwise the estimator is fitted from
/// `--model` and applied to the `score` column.
#[derive(Debug, Args)]
pub struct PredictionArgs {
    #[arg(long, default_value = "pic")]
    pub estimator: EstimatorKind,
    /// Model fitted on training data.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    pub fmr: f64,
    #[arg(long, default_value = "rule")]
    pub pic_threshold: PicThreshold,
    #[arg(long, value_enum, default_value_t = DecisionFilter::All)]
    pub decisions: DecisionFilter,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Scored or fused CSV with a `label` column.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub prediction: PredictionArgs,
    #[arg(long, default_value_t = DEFAULT_ECE_BINS)]
    pub ece_bins: usize,
    /// Per-bin table; the summary goes to `<stem>.summary.csv` next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Scored CSV with `score` and `label` columns.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Model fitted on the test data, giving the true confidence.
    #[arg(long)]
    pub test_model: PathBuf,
    #[command(flatten)]
    pub prediction: PredictionArgs,
    #[arg(long, default_value_t = DEFAULT_CCC_BINS)]
    pub bins: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON file with generator settings; flags below override it.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_genuine: Option<usize>,
    #[arg(long)]
    pub n_imposter: Option<usize>,
    #[arg(long)]
    pub genuine_mean: Option<f64>,
    #[arg(long)]
    pub genuine_std: Option<f64>,
    #[arg(long)]
    pub imposter_mean: Option<f64>,
    #[arg(long)]
    pub imposter_std: Option<f64>,
    #[arg(long)]
    pub subjects: Option<usize>,
    #[arg(long)]
    pub refs_per_probe: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Provenance record written next to every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub estimator: Option<String>,
    pub target_fmr: Option<f64>,
    pub ece_bins: Option<usize>,
    pub ccc_bins: Option<usize>,
    pub seed: Option<u64>,
    pub options: BTreeMap<String, serde_json::Value>,
    pub tool_version: String,
}

impl RunManifest {
    fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            estimator: None,
            target_fmr: None,
            ece_bins: None,
            ccc_bins: None,
            seed: None,
            options: BTreeMap::new(),
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    fn input(mut self, p: &Path) -> Self {
        self.inputs.push(p.display().to_string());
        self
    }

    fn output(mut self, p: &Path) -> Self {
        self.outputs.push(p.display().to_string());
        self
    }

    fn option(mut self, key: &str, value: serde_json::Value) -> Self {
        self.options.insert(key.to_string(), value);
        self
    }

    /// Writes the manifest to `<first output>.manifest.json`.
    pub fn write(&self) -> Result<PathBuf> {
        let first = self.outputs.first().ok_or_else(|| {
            PicError::InvalidArgument("manifest without outputs".into())
        })?;
        let path = PathBuf::from(format!("{first}.manifest.json"));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| PicError::io(&path, e))?;
        Ok(path)
    }
}

pub fn fmt6(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.6}")
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| PicError::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| PicError::io(path, e))
}

fn check_fmr(fmr: f64) -> Result<()> {
    if fmr > 0.0 && fmr < 1.0 {
        Ok(())
    } else {
        Err(PicError::InvalidArgument(format!("--fmr {fmr} must lie in (0, 1)")))
    }
}

/// Parses `args` and runs the command, returning the process exit status:
/// 0 on success, 2 for usage or validation errors, 1 otherwise.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Split(a) => cmd_split(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Score(a) => cmd_score(&a),
        Command::Fuse(a) => cmd_fuse(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Curve(a) => cmd_curve(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

pub fn cmd_split(a: &SplitArgs) -> Result<()> {
    let set = load_scores(&a.input)?;
    let out = split_subject_exclusive(set.records(), a.fraction, a.seed)?;
    save_scores(&a.out_train, out.train.records())?;
    save_scores(&a.out_test, out.test.records())?;
    println!("dropped {} cross-partition records", out.dropped);
    for (name, side, subjects) in [
        ("train", &out.train, out.train_subjects.len()),
        ("test", &out.test, out.test_subjects.len()),
    ] {
        println!(
            "{name}: {subjects} subjects, {} genuine, {} imposter",
            side.genuine_scores().len(),
            side.imposter_scores().len()
        );
    }
    RunManifest {
        seed: Some(a.seed),
        ..RunManifest::new("split")
    }
    .input(&a.input)
    .output(&a.out_train)
    .output(&a.out_test)
    .option("fraction", json!(a.fraction))
    .option("dropped", json!(out.dropped))
    .write()?;
    Ok(())
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let set = load_scores(&a.input)?;
    let model = DensityModel::fit(&set, a.prior, a.resolution)?;
    model.save(&a.out)?;
    println!(
        "genuine: n={} bandwidth={:.6}",
        set.genuine_scores().len(),
        model.genuine().bandwidth()
    );
    println!(
        "imposter: n={} bandwidth={:.6}",
        set.imposter_scores().len(),
        model.imposter().bandwidth()
    );
    println!(
        "grid: [{:.6}, {:.6}] with {} points",
        model.genuine().grid_min(),
        model.genuine().grid_max(),
        model.genuine().grid_resolution()
    );
    RunManifest::new("train")
        .input(&a.input)
        .output(&a.out)
        .option("prior_genuine", json!(a.prior))
        .option("resolution", json!(a.resolution))
        .write()?;
    Ok(())
}

pub fn cmd_score(a: &ScoreArgs) -> Result<()> {
    check_fmr(a.fmr)?;
    let model = DensityModel::load(&a.model)?;
    let set = load_scores(&a.input)?;
    let est = ConfidenceEstimator::fit(EstimatorKind::Pic, model, a.fmr, a.pic_threshold)?;
    let mut w = csv_writer(&a.out)?;
    let header: Vec<&str> = SCORE_COLUMNS
        .iter()
        .copied()
        .chain(["pic", "decision", "confidence"])
        .collect();
    w.write_record(&header)?;
    for r in set.records() {
        let pic = pic_single(est.model(), r.score).value;
        let d = est.assess(r.score);
        let mut row = record_fields(r).to_vec();
        row.extend([fmt6(pic), d.decision.to_string(), fmt6(d.confidence)]);
        w.write_record(&row)?;
    }
    finish(w, &a.out)?;
    println!(
        "scored {} records at PIC threshold {:.6}",
        set.len(),
        est.pic_threshold()
    );
    RunManifest {
        estimator: Some("pic".into()),
        target_fmr: Some(a.fmr),
        ..RunManifest::new("score")
    }
    .input(&a.model)
    .input(&a.input)
    .output(&a.out)
    .option("pic_threshold", json!(est.pic_threshold()))
    .write()?;
    Ok(())
}

pub fn cmd_fuse(a: &FuseArgs) -> Result<()> {
    check_fmr(a.fmr)?;
    if a.max_refs == 0 {
        return Err(PicError::InvalidArgument("--max-refs must be positive".into()));
    }
    let model = DensityModel::load(&a.model)?;
    let set = load_scores(&a.input)?;
    let est = ConfidenceEstimator::fit(EstimatorKind::Pic, model, a.fmr, a.pic_threshold)?;

    struct Group<'a> {
        probe: &'a str,
        claim: &'a str,
        label: Label,
        scores: Vec<f64>,
    }
    let mut index: HashMap<(&str, &str), usize> = HashMap::new();
    let mut groups: Vec<Group> = Vec::new();
    for (i, r) in set.records().iter().enumerate() {
        let (Some(probe), Some(claim)) = (r.probe_id.as_deref(), r.subject_b.as_deref()) else {
            return Err(PicError::MalformedRow {
                row: i + 1,
                message: "fusion needs probe_id and subject_b".into(),
            });
        };
        let g = *index.entry((probe, claim)).or_insert_with(|| {
            groups.push(Group {
                probe,
                claim,
                label: r.label,
                scores: Vec::new(),
            });
            groups.len() - 1
        });
        let group = &mut groups[g];
        if group.label != r.label {
            return Err(PicError::MalformedRow {
                row: i + 1,
                message: format!("probe `{probe}` against `{claim}` mixes genuine and imposter labels"),
            });
        }
        if group.scores.len() < a.max_refs {
            group.scores.push(r.score);
        }
    }

    let mut w = csv_writer(&a.out)?;
    w.write_record(["probe_id", "claimed_id", "n_used", "pic", "decision", "confidence", "label"])?;
    for g in &groups {
        let pic = crate::pic::pic_multi(est.model(), &g.scores)?.value;
        let d = est.assess_fused(&g.scores)?;
        w.write_record([
            g.probe.to_string(),
            g.claim.to_string(),
            g.scores.len().to_string(),
            fmt6(pic),
            d.decision.to_string(),
            fmt6(d.confidence),
            g.label.to_string(),
        ])?;
    }
    finish(w, &a.out)?;
    println!("fused {} records into {} groups", set.len(), groups.len());
    RunManifest {
        estimator: Some("pic".into()),
        target_fmr: Some(a.fmr),
        ..RunManifest::new("fuse")
    }
    .input(&a.model)
    .input(&a.input)
    .output(&a.out)
    .option("max_refs", json!(a.max_refs))
    .option("pic_threshold", json!(est.pic_threshold()))
    .write()?;
    Ok(())
}

/// A CSV held in memory with named columns.
struct Table {
    headers: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| PicError::io(path, e))?;
        let mut rdr = csv::Reader::from_reader(file);
        let headers = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let rows = rdr.records().collect::<std::result::Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Err(PicError::NoRecords {
                path: path.to_path_buf(),
            });
        }
        Ok(Table { headers, rows })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.col(name).ok_or_else(|| PicError::MissingColumn(name.into()))
    }

    fn parse<T: std::str::FromStr>(&self, row: usize, col: usize) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.rows[row].get(col).unwrap_or("").trim();
        raw.parse().map_err(|e: T::Err| PicError::MalformedRow {
            row: row + 1,
            message: format!("`{raw}` in column `{}`: {e}", self.headers[col]),
        })
    }
}

struct Prediction {
    score: Option<f64>,
    label: Label,
    decision: Label,
    confidence: f64,
}

/// Decisions and confidences for every row, per [`PredictionArgs`].
fn predictions(table: &Table, p: &PredictionArgs) -> Result<(Vec<Prediction>, Option<f64>)> {
    check_fmr(p.fmr)?;
    let label_col = table.require("label")?;
    let score_col = table.col("score");
    let stored = match (table.col("decision"), table.col("confidence")) {
        (Some(d), Some(c)) if p.estimator == EstimatorKind::Pic => Some((d, c)),
        _ => None,
    };
    let estimator = match stored {
        Some(_) => None,
        None => {
            let path = p.model.as_ref().ok_or_else(|| {
                PicError::InvalidArgument(format!(
                    "--model is required to apply the {} estimator",
                    p.estimator
                ))
            })?;
            table.require("score")?;
            let model = DensityModel::load(path)?;
            Some(ConfidenceEstimator::fit(p.estimator, model, p.fmr, p.pic_threshold)?)
        }
    };
    let mut out = Vec::with_capacity(table.rows.len());
    for row in 0..table.rows.len() {
        let label: Label = table.parse(row, label_col)?;
        let score = score_col.map(|c| table.parse::<f64>(row, c)).transpose()?;
        let (decision, confidence) = match (&estimator, stored) {
            (Some(est), _) => {
                // score presence checked when the estimator was built
                let d = est.assess(score.unwrap_or_default());
                (d.decision, d.confidence)
            }
            (None, Some((dc, cc))) => (table.parse(row, dc)?, table.parse(row, cc)?),
            (None, None) => unreachable!("either stored columns or an estimator"),
        };
        if p.decisions.keeps(decision) {
            out.push(Prediction {
                score,
                label,
                decision,
                confidence,
            });
        }
    }
    if out.is_empty() {
        return Err(PicError::EmptyInput("no rows left after the decision filter"));
    }
    Ok((out, estimator.map(|e| e.raw_threshold())))
}

fn prediction_manifest(command: &str, p: &PredictionArgs) -> RunManifest {
    let mut m = RunManifest {
        estimator: Some(p.estimator.to_string()),
        target_fmr: Some(p.fmr),
        ..RunManifest::new(command)
    };
    if let Some(model) = &p.model {
        m = m.input(model);
    }
    m.option("decisions", json!(p.decisions.as_str()))
        .option("pic_threshold", json!(format!("{:?}", p.pic_threshold).to_lowercase()))
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let table = Table::load(&a.input)?;
    let (preds, raw_threshold) = predictions(&table, &a.prediction)?;
    let conf: Vec<f64> = preds.iter().map(|p| p.confidence).collect();
    let correct: Vec<bool> = preds.iter().map(|p| p.decision == p.label).collect();
    let report = calibration_report(&conf, &correct, a.ece_bins)?;

    let mut w = csv_writer(&a.out)?;
    w.write_record(["bin_lo", "bin_hi", "count", "p_true", "p_pred_mean", "p_pred_std"])?;
    for b in &report.bins {
        w.write_record([
            fmt6(b.lo),
            fmt6(b.hi),
            b.count.to_string(),
            fmt6(b.p_true),
            fmt6(b.p_pred_mean),
            fmt6(b.p_pred_std),
        ])?;
    }
    finish(w, &a.out)?;

    let count = |label: Label, decision: Label| {
        preds
            .iter()
            .filter(|p| p.label == label && p.decision == decision)
            .count()
    };
    let n_imp = preds.iter().filter(|p| p.label == Label::Imposter).count();
    let n_gen = preds.len() - n_imp;
    let rate = |k: usize, n: usize| if n == 0 { f64::NAN } else { k as f64 / n as f64 };
    let mut summary: Vec<(&str, String)> = vec![
        ("estimator", a.prediction.estimator.to_string()),
        ("n", preds.len().to_string()),
        ("n_genuine", n_gen.to_string()),
        ("n_imposter", n_imp.to_string()),
        ("ece_bins", a.ece_bins.to_string()),
        ("ece", fmt6(report.ece)),
        ("mce", fmt6(report.mce)),
        ("target_fmr", fmt6(a.prediction.fmr)),
        ("decision_fmr", fmt6(rate(count(Label::Imposter, Label::Genuine), n_imp))),
        ("decision_fnmr", fmt6(rate(count(Label::Genuine, Label::Imposter), n_gen))),
    ];
    if let Some(t) = raw_threshold {
        summary.push(("train_threshold", fmt6(t)));
    }
    let scores = |label: Label| -> Vec<f64> {
        preds
            .iter()
            .filter(|p| p.label == label)
            .filter_map(|p| p.score)
            .collect()
    };
    let (g, f) = (scores(Label::Genuine), scores(Label::Imposter));
    if !g.is_empty() && !f.is_empty() && g.len() + f.len() == preds.len() {
        let v = fnmr_at_fmr(&g, &f, a.prediction.fmr)?;
        summary.push(("score_threshold_at_fmr", fmt6(v.threshold)));
        summary.push(("score_fmr", fmt6(v.fmr)));
        summary.push(("score_fnmr_at_fmr", fmt6(v.fnmr)));
    }

    let summary_path = a.out.with_extension("summary.csv");
    let mut w = csv_writer(&summary_path)?;
    w.write_record(["metric", "value"])?;
    for (k, v) in &summary {
        w.write_record([k, v.as_str()])?;
    }
    finish(w, &summary_path)?;
    for (k, v) in &summary {
        println!("{k:<24}{v}");
    }

    prediction_manifest("eval", &a.prediction)
        .input(&a.input)
        .output(&a.out)
        .output(&summary_path)
        .write_with(|m| m.ece_bins = Some(a.ece_bins))?;
    Ok(())
}

impl RunManifest {
    fn write_with(mut self, f: impl FnOnce(&mut RunManifest)) -> Result<PathBuf> {
        f(&mut self);
        self.write()
    }
}

pub fn cmd_curve(a: &CurveArgs) -> Result<()> {
    let table = Table::load(&a.input)?;
    table.require("score")?;
    let (preds, _) = predictions(&table, &a.prediction)?;
    let test_model = DensityModel::load(&a.test_model)?;
    let truth: Vec<f64> = preds
        .iter()
        .map(|p| true_confidence_for_decision(&test_model, p.score.unwrap_or_default(), p.decision))
        .collect();
    let pred: Vec<f64> = preds.iter().map(|p| p.confidence).collect();
    let curve = ccc(&truth, &pred, a.bins)?;

    let mut w = csv_writer(&a.out)?;
    w.write_record(["bin_center", "pred_mean", "pred_std", "count"])?;
    for c in &curve {
        w.write_record([
            fmt6(c.bin_center),
            fmt6(c.pred_mean),
            fmt6(c.pred_std),
            c.count.to_string(),
        ])?;
    }
    finish(w, &a.out)?;
    println!(
        "{} bins, {} non-empty, {} samples",
        curve.len(),
        curve.iter().filter(|c| c.count > 0).count(),
        preds.len()
    );
    prediction_manifest("curve", &a.prediction)
        .input(&a.input)
        .input(&a.test_model)
        .output(&a.out)
        .write_with(|m| m.ccc_bins = Some(a.bins))?;
    Ok(())
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut cfg = match &a.params {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| PicError::io(path, e))?;
            serde_json::from_str::<SynthConfig>(&text)?
        }
        None => SynthConfig::default(),
    };
    macro_rules! apply {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = a.$flag { cfg.$field = v; })*
        };
    }
    apply!(
        seed => seed,
        n_genuine => n_genuine,
        n_imposter => n_imposter,
        genuine_mean => genuine_mean,
        genuine_std => genuine_std,
        imposter_mean => imposter_mean,
        imposter_std => imposter_std,
        subjects => n_subjects,
        refs_per_probe => refs_per_probe
    );
    let set = generate(&cfg)?;
    save_scores(&a.out, set.records())?;
    println!(
        "wrote {} genuine and {} imposter scores",
        cfg.n_genuine, cfg.n_imposter
    );
    let mut m = RunManifest {
        seed: Some(cfg.seed),
        ..RunManifest::new("synth")
    };
    if let Some(p) = &a.params {
        m = m.input(p);
    }
    m.output(&a.out).option("config", json!(cfg)).write()?;
    Ok(())
}
