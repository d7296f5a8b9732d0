//! Threshold classification against ground truth, inter-measure
//! correlation, pair sampling and scatter export.

mod sample;
mod scatter;
mod stats;
mod truth;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use sample::{sample_pairs, Reservoir};
pub use scatter::{
    export_scatter, scatter_summary, write_scatter_csv, AxisSummary, ScatterSummary,
    BOTTOM_LEFT_CUTOFF, SCATTER_CSV, SUMMARY_JSON,
};
pub use stats::{average_ranks, pearson, spearman};
pub use truth::{
    format_timestamp, latest_per_rater, read_truth_csv, resolve, write_truth_csv, write_truth_row,
    GroundTruthLabel, Verdict, TRUTH_HEADER,
};

use crate::distance::PairScores;
use crate::error::{Error, Result};
use crate::pairing::PairKey;

/// Default duplicate threshold for every measure.
pub const DEFAULT_THRESHOLD: f64 = 0.2;

/// A distance column of the scores file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    LevNorm,
    CosineDist,
    EmbedDist,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::LevNorm, Measure::CosineDist, Measure::EmbedDist];

    pub fn name(self) -> &'static str {
        match self {
            Measure::LevNorm => "lev_norm",
            Measure::CosineDist => "cosine_dist",
            Measure::EmbedDist => "embed_dist",
        }
    }

    pub fn value(self, s: &PairScores) -> Option<f64> {
        match self {
            Measure::LevNorm => Some(s.lev_norm),
            Measure::CosineDist => Some(s.cosine_dist),
            Measure::EmbedDist => s.embed_dist,
        }
    }

    /// Column values, or `MissingMeasure` if any row lacks one.
    pub fn column(self, scores: &[PairScores]) -> Result<Vec<f64>> {
        scores
            .iter()
            .map(|s| self.value(s).ok_or(Error::MissingMeasure(self.name())))
            .collect()
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    /// Accepts the short CLI names `lev`, `cos`, `embed` and the column names.
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lev" | "lev_norm" => Ok(Measure::LevNorm),
            "cos" | "cosine" | "cosine_dist" => Ok(Measure::CosineDist),
            "embed" | "embed_dist" => Ok(Measure::EmbedDist),
            other => Err(format!("unknown measure `{other}` (expected lev, cos or embed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub key: PairKey,
    pub duplicate: bool,
}

/// Predicts a duplicate iff the measure is at most `threshold`.
pub fn classify(scores: &[PairScores], measure: Measure, threshold: f64) -> Result<Vec<Prediction>> {
    let values = measure.column(scores)?;
    Ok(scores
        .iter()
        .zip(values)
        .map(|(s, d)| Prediction {
            key: s.key(),
            duplicate: d <= threshold,
        })
        .collect())
}

/// Confusion counts with derived metrics; `None` marks an undefined ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl Confusion {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        };
        Self { tp, fp, fn_, tn, precision, recall, f1 }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Scores predictions against resolved ground truth.
///
/// Predicted pairs without a label, or whose resolved verdict is unsure, are
/// not counted.
pub fn confusion(predicted: &[Prediction], truth: &[GroundTruthLabel]) -> Result<Confusion> {
    let resolved = resolve(truth);
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for p in predicted {
        let actual = match resolved.get(&p.key) {
            Some(Verdict::Duplicate) => true,
            Some(Verdict::NotDuplicate) => false,
            Some(Verdict::Unsure) | None => continue,
        };
        match (p.duplicate, actual) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    if tp + fp + fn_ + tn == 0 {
        return Err(Error::NoOverlap);
    }
    Ok(Confusion::from_counts(tp, fp, fn_, tn))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    #[default]
    Pearson,
    Spearman,
}

/// Correlation for every pair of measures present on all rows.
///
/// The `lev_norm`/`cosine_dist` pair is always computed; pairs involving
/// `embed_dist` appear only when every row carries embeddings.
pub fn correlate(
    scores: &[PairScores],
    method: CorrelationMethod,
) -> Result<BTreeMap<(Measure, Measure), f64>> {
    let columns: Vec<(Measure, Vec<f64>)> = Measure::ALL
        .into_iter()
        .filter_map(|m| m.column(scores).ok().map(|c| (m, c)))
        .collect();
    let mut out = BTreeMap::new();
    for (i, (ma, a)) in columns.iter().enumerate() {
        for (mb, b) in &columns[i + 1..] {
            let r = match method {
                CorrelationMethod::Pearson => pearson(a, b),
                CorrelationMethod::Spearman => spearman(a, b),
            };
            let r = r.map_err(|e| match e {
                Error::DegenerateVariance("x") => Error::DegenerateVariance(ma.name()),
                Error::DegenerateVariance(_) => Error::DegenerateVariance(mb.name()),
                other => other,
            })?;
            out.insert((*ma, *mb), r);
        }
    }
    Ok(out)
}

/// Summary of one `evaluate` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub measure: Measure,
    pub threshold: f64,
    #[serde(flatten)]
    pub confusion: Confusion,
    pub correlation_method: CorrelationMethod,
    /// Keyed `"<a>~<b>"`, e.g. `"lev_norm~cosine_dist"`.
    pub correlations: BTreeMap<String, f64>,
    pub sample_size: usize,
}

pub fn evaluate(
    scores: &[PairScores],
    truth: &[GroundTruthLabel],
    measure: Measure,
    threshold: f64,
    method: CorrelationMethod,
) -> Result<EvalReport> {
    let predicted = classify(scores, measure, threshold)?;
    let confusion = confusion(&predicted, truth)?;
    let correlations = correlate(scores, method)?
        .into_iter()
        .map(|((a, b), r)| (format!("{a}~{b}"), r))
        .collect();
    Ok(EvalReport {
        measure,
        threshold,
        confusion,
        correlation_method: method,
        correlations,
        sample_size: scores.len(),
    })
}
