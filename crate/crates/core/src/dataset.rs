//! Labeled comparison scores: CSV ingestion, genuine/imposter partitioning and
//! the subject-exclusive train/test split.
//!
//! The CSV layout is `score,label,probe_id,reference_id,subject_a,subject_b`
//! with a mandatory header row. Only `score` and `label` are required; the
//! identifier columns may be absent or left empty. Columns the loader does not
//! know (for instance the `pic,decision,confidence` columns appended by the
//! scorer) are ignored, so scored files can be read back as score sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PicError, Result};

pub const SCORE_COLUMNS: [&str; 6] = [
    "score",
    "label",
    "probe_id",
    "reference_id",
    "subject_a",
    "subject_b",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Genuine,
    Imposter,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Genuine => "genuine",
            Label::Imposter => "imposter",
        }
    }

    pub fn is_genuine(self) -> bool {
        self == Label::Genuine
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("genuine") {
            Ok(Label::Genuine)
        } else if t.eq_ignore_ascii_case("imposter") {
            Ok(Label::Imposter)
        } else {
            Err(format!("unknown label `{t}` (expected `genuine` or `imposter`)"))
        }
    }
}

/// One labeled comparison score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub score: f64,
    pub label: Label,
    pub probe_id: Option<String>,
    pub reference_id: Option<String>,
    pub subject_a: Option<String>,
    pub subject_b: Option<String>,
}

impl ComparisonRecord {
    pub fn new(score: f64, label: Label) -> Self {
        ComparisonRecord {
            score,
            label,
            probe_id: None,
            reference_id: None,
            subject_a: None,
            subject_b: None,
        }
    }

    pub fn with_subjects(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.subject_a = Some(a.into());
        self.subject_b = Some(b.into());
        self
    }

    pub fn with_ids(mut self, probe: impl Into<String>, reference: impl Into<String>) -> Self {
        self.probe_id = Some(probe.into());
        self.reference_id = Some(reference.into());
        self
    }

    /// Checks the record invariants, returning a description of the first
    /// violation.
    pub fn check(&self) -> std::result::Result<(), String> {
        if !self.score.is_finite() {
            return Err(format!("score {} is not finite", self.score));
        }
        if let (Some(a), Some(b)) = (&self.subject_a, &self.subject_b) {
            if self.label.is_genuine() && a != b {
                return Err(format!(
                    "genuine comparison between different subjects `{a}` and `{b}`"
                ));
            }
        }
        Ok(())
    }
}

/// A collection of comparison records together with the per-class score
/// arrays derived from them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledScoreSet {
    records: Vec<ComparisonRecord>,
    genuine: Vec<f64>,
    imposter: Vec<f64>,
}

impl LabeledScoreSet {
    pub fn new(records: Vec<ComparisonRecord>) -> Self {
        let (genuine, imposter) = partition(&records);
        LabeledScoreSet {
            records,
            genuine,
            imposter,
        }
    }

    pub fn from_scores(genuine: &[f64], imposter: &[f64]) -> Self {
        let records = genuine
            .iter()
            .map(|&s| ComparisonRecord::new(s, Label::Genuine))
            .chain(imposter.iter().map(|&s| ComparisonRecord::new(s, Label::Imposter)))
            .collect();
        Self::new(records)
    }

    pub fn records(&self) -> &[ComparisonRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ComparisonRecord> {
        self.records
    }

    pub fn genuine_scores(&self) -> &[f64] {
        &self.genuine
    }

    pub fn imposter_scores(&self) -> &[f64] {
        &self.imposter
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Fails unless both classes have at least one score.
    pub fn require_both_classes(&self) -> Result<()> {
        if self.genuine.is_empty() {
            return Err(PicError::EmptyClass { class: "genuine" });
        }
        if self.imposter.is_empty() {
            return Err(PicError::EmptyClass { class: "imposter" });
        }
        Ok(())
    }
}

/// Splits records into genuine and imposter score arrays, preserving order.
pub fn partition(records: &[ComparisonRecord]) -> (Vec<f64>, Vec<f64>) {
    let mut genuine = Vec::new();
    let mut imposter = Vec::new();
    for r in records {
        match r.label {
            Label::Genuine => genuine.push(r.score),
            Label::Imposter => imposter.push(r.score),
        }
    }
    (genuine, imposter)
}

/// Loads a score CSV from disk.
pub fn load_scores(path: impl AsRef<Path>) -> Result<LabeledScoreSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| PicError::io(path, e))?;
    let set = read_scores(file)?;
    if set.is_empty() {
        return Err(PicError::NoRecords {
            path: path.to_path_buf(),
        });
    }
    Ok(set)
}

/// Reads score records from any CSV source. Rows are numbered from 1, not
/// counting the header. An input without data rows yields an empty set.
pub fn read_scores<R: Read>(reader: R) -> Result<LabeledScoreSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Ok(LabeledScoreSet::default());
    }
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let score_col = col("score").ok_or_else(|| PicError::MissingColumn("score".into()))?;
    let label_col = col("label").ok_or_else(|| PicError::MissingColumn("label".into()))?;
    let opt_cols = [
        col("probe_id"),
        col("reference_id"),
        col("subject_a"),
        col("subject_b"),
    ];

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| PicError::MalformedRow {
            row: row_no,
            message: e.to_string(),
        })?;
        let field = |idx: usize| row.get(idx).unwrap_or("").trim();
        let raw_score = field(score_col);
        let score: f64 = raw_score.parse().map_err(|_| PicError::MalformedRow {
            row: row_no,
            message: format!("cannot parse score `{raw_score}`"),
        })?;
        let label: Label = field(label_col)
            .parse()
            .map_err(|message| PicError::MalformedRow {
                row: row_no,
                message,
            })?;
        let opt = |c: Option<usize>| {
            c.map(field)
                .filter(|v| !v.is_empty())
                .map(str::to_string)
        };
        let record = ComparisonRecord {
            score,
            label,
            probe_id: opt(opt_cols[0]),
            reference_id: opt(opt_cols[1]),
            subject_a: opt(opt_cols[2]),
            subject_b: opt(opt_cols[3]),
        };
        record.check().map_err(|message| PicError::MalformedRow {
            row: row_no,
            message,
        })?;
        records.push(record);
    }
    Ok(LabeledScoreSet::new(records))
}

/// Writes records in the canonical six-column layout with six fractional
/// digits on the score.
pub fn write_scores<W: Write>(writer: W, records: &[ComparisonRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(SCORE_COLUMNS)?;
    for r in records {
        wtr.write_record(record_fields(r))?;
    }
    wtr.flush().map_err(|e| PicError::io("<csv output>", e))?;
    Ok(())
}

pub fn save_scores(path: impl AsRef<Path>, records: &[ComparisonRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| PicError::io(path, e))?;
    write_scores(std::io::BufWriter::new(file), records)
}

pub(crate) fn record_fields(r: &ComparisonRecord) -> [String; 6] {
    let s = |v: &Option<String>| v.clone().unwrap_or_default();
    [
        format!("{:.6}", r.score),
        r.label.to_string(),
        s(&r.probe_id),
        s(&r.reference_id),
        s(&r.subject_a),
        s(&r.subject_b),
    ]
}

/// Result of a subject-exclusive split.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub train: LabeledScoreSet,
    pub test: LabeledScoreSet,
    /// Records whose two subjects landed on different sides.
    pub dropped: usize,
    pub train_subjects: BTreeSet<String>,
    pub test_subjects: BTreeSet<String>,
}

#[derive(Debug, Default, Clone, Copy)]
struct SubjectLoad {
    genuine: usize,
    imposter: usize,
}

/// Partitions subjects between train and test so that no subject appears on
/// both sides, balancing genuine-comparison counts at the requested fraction.
///
/// Subjects are visited in descending order of their within-subject (genuine)
/// comparison count and each is placed on the side whose load, relative to its
/// target share, is currently lighter. The seed only breaks ties in the visit
/// order. Cross-subject records whose subjects end up on different sides are
/// dropped and counted.
pub fn split_subject_exclusive(
    records: &[ComparisonRecord],
    train_fraction: f64,
    seed: u64,
) -> Result<SplitOutcome> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(PicError::InvalidArgument(format!(
            "train fraction {train_fraction} must lie in (0, 1)"
        )));
    }
    if records.is_empty() {
        return Err(PicError::EmptyInput("no records to split"));
    }

    let mut loads: BTreeMap<&str, SubjectLoad> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let (Some(a), Some(b)) = (r.subject_a.as_deref(), r.subject_b.as_deref()) else {
            return Err(PicError::MissingSubjects { row: i + 1 });
        };
        if a == b {
            loads.entry(a).or_default().genuine += 1;
        } else {
            loads.entry(a).or_default().imposter += 1;
            loads.entry(b).or_default().imposter += 1;
        }
    }
    if loads.len() < 2 {
        let only = loads.keys().next().copied().unwrap_or_default();
        return Err(PicError::SingleSubject(only.to_string()));
    }

    let mut order: Vec<(&str, SubjectLoad)> = loads.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order.sort_by(|x, y| {
        y.1.genuine
            .cmp(&x.1.genuine)
            .then(y.1.imposter.cmp(&x.1.imposter))
    });

    let test_fraction = 1.0 - train_fraction;
    let mut train_load = SubjectLoad::default();
    let mut test_load = SubjectLoad::default();
    let mut train_subjects = BTreeSet::new();
    let mut test_subjects = BTreeSet::new();
    for (subject, load) in order {
        let tg = train_load.genuine as f64 / train_fraction;
        let sg = test_load.genuine as f64 / test_fraction;
        let to_train = if tg != sg {
            tg < sg
        } else {
            train_load.imposter as f64 / train_fraction
                <= test_load.imposter as f64 / test_fraction
        };
        let (side, set) = if to_train {
            (&mut train_load, &mut train_subjects)
        } else {
            (&mut test_load, &mut test_subjects)
        };
        side.genuine += load.genuine;
        side.imposter += load.imposter;
        set.insert(subject.to_string());
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut dropped = 0;
    for r in records {
        // Presence was checked above.
        let a = r.subject_a.as_deref().unwrap_or_default();
        let b = r.subject_b.as_deref().unwrap_or_default();
        match (train_subjects.contains(a), train_subjects.contains(b)) {
            (true, true) => train.push(r.clone()),
            (false, false) => test.push(r.clone()),
            _ => dropped += 1,
        }
    }

    Ok(SplitOutcome {
        train: LabeledScoreSet::new(train),
        test: LabeledScoreSet::new(test),
        dropped,
        train_subjects,
        test_subjects,
    })
}
