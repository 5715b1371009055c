//! Accuracy and frequency reports, and marker-vector export.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::datasets::shuffle_within_labels;
use crate::error::{Error, Result};
use crate::extraction::{FrequencyMap, Instance};
use crate::linclass::{kfold_predictions, FeaturizationMode, KFoldConfig, LinearModel};

pub const REPORT_VERSION: u32 = 1;

/// Largest label frequency over the total.
pub fn majority_baseline<S: AsRef<str>>(labels: &[S]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::Argument("majority baseline of an empty label set".into()));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_ref()).or_default() += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0);
    Ok(max as f64 / labels.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkerAccuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub overall: f64,
    pub correct: usize,
    pub total: usize,
    pub k_for_hit: usize,
    pub per_marker: BTreeMap<String, MarkerAccuracy>,
    pub baseline_majority: f64,
}

impl AccuracyReport {
    /// Overall accuracy recomputed from the per-marker rows.
    pub fn recomputed_overall(&self) -> f64 {
        let (c, t) = self
            .per_marker
            .values()
            .fold((0, 0), |(c, t), m| (c + m.correct, t + m.total));
        c as f64 / t as f64
    }
}

/// Scores top-k prediction lists against gold labels. A prediction is a hit
/// when the gold label is among its first `k_for_hit` entries.
pub fn accuracy_report<P, G>(predictions: &[P], gold: &[G], k_for_hit: usize) -> Result<AccuracyReport>
where
    P: AsRef<[String]>,
    G: AsRef<str>,
{
    if predictions.len() != gold.len() {
        return Err(Error::Argument(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Argument("accuracy of an empty prediction set".into()));
    }
    if k_for_hit < 1 {
        return Err(Error::Argument("k_for_hit must be at least 1".into()));
    }
    let mut tallies: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (top, g) in predictions.iter().zip(gold) {
        let g = g.as_ref();
        let hit = top.as_ref().iter().take(k_for_hit).any(|p| p == g);
        let t = tallies.entry(g.to_string()).or_default();
        t.0 += hit as usize;
        t.1 += 1;
    }
    let correct = tallies.values().map(|t| t.0).sum::<usize>();
    let total = gold.len();
    Ok(AccuracyReport {
        overall: correct as f64 / total as f64,
        correct,
        total,
        k_for_hit,
        per_marker: tallies
            .into_iter()
            .map(|(m, (c, t))| {
                (
                    m,
                    MarkerAccuracy {
                        correct: c,
                        total: t,
                        accuracy: c as f64 / t as f64,
                    },
                )
            })
            .collect(),
        baseline_majority: majority_baseline(gold)?,
    })
}

/// Markers with their accuracies.
pub type Ranking = Vec<(String, f64)>;

/// `(bottom, top)` markers by accuracy, `n` of each. Bottom is ascending, top
/// descending; ties go to the lexicographically smaller marker first.
pub fn extremes(report: &AccuracyReport, n: usize) -> (Ranking, Ranking) {
    let rows: Vec<(String, f64)> = report.per_marker.iter().map(|(m, a)| (m.clone(), a.accuracy)).collect();
    let mut bottom = rows.clone();
    bottom.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut top = rows;
    top.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    bottom.truncate(n);
    top.truncate(n);
    (bottom, top)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub marker: String,
    pub count: u64,
    pub above_cap: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub cap: u64,
    pub total: u64,
    pub markers_above_cap: usize,
    pub rows: Vec<FrequencyRow>,
}

impl FrequencyReport {
    /// `marker TAB count TAB above_cap`, with a `# cap` header line.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# cap\t{}\n", self.cap);
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{}\n", r.marker, r.count, r.above_cap as u8));
        }
        out
    }
}

/// Markers by descending count (ties by form), annotated against the cap.
pub fn frequency_report(frequencies: &FrequencyMap, cap: u64) -> FrequencyReport {
    let mut rows: Vec<FrequencyRow> = frequencies
        .counts()
        .into_iter()
        .map(|(marker, count)| FrequencyRow {
            marker,
            count,
            above_cap: count > cap,
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.marker.cmp(&b.marker)));
    FrequencyReport {
        cap,
        total: rows.iter().map(|r| r.count).sum(),
        markers_above_cap: rows.iter().filter(|r| r.above_cap).count(),
        rows,
    }
}

/// Each label's output row scaled to unit Euclidean norm, in label order.
pub fn export_marker_vectors(model: &LinearModel) -> Result<Vec<(String, Vec<f64>)>> {
    model
        .labels()
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let row: Vec<f64> = model.label_row(k).iter().map(|&w| w as f64).collect();
            let norm = row.iter().map(|w| w * w).sum::<f64>().sqrt();
            if !norm.is_finite() || norm <= 0.0 {
                return Err(Error::Export(format!("label {label:?} has a zero weight row")));
            }
            Ok((label.clone(), row.into_iter().map(|w| w / norm).collect()))
        })
        .collect()
}

/// `label TAB v1 TAB ... TAB vdim`, one line per label.
pub fn write_embeddings_tsv<W: Write>(mut w: W, vectors: &[(String, Vec<f64>)]) -> Result<()> {
    let err = |e| Error::io("writing embeddings", e);
    for (label, v) in vectors {
        write!(w, "{label}").map_err(err)?;
        for x in v {
            write!(w, "\t{x}").map_err(err)?;
        }
        writeln!(w).map_err(err)?;
    }
    w.flush().map_err(err)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremesReport {
    pub n: usize,
    pub bottom: Ranking,
    pub top: Ranking,
}

/// Versioned container for everything `report` emits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub report_version: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy: Option<AccuracyReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub extremes: Option<ExtremesReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub frequencies: Option<FrequencyReport>,
}

impl Report {
    pub fn new() -> Self {
        Report {
            report_version: REPORT_VERSION,
            accuracy: None,
            extremes: None,
            frequencies: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Report = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if report.report_version != REPORT_VERSION {
            return Err(Error::Format(format!(
                "unsupported report version {}",
                report.report_version
            )));
        }
        Ok(report)
    }

    /// Plain-text rendering of the JSON content.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(a) = &self.accuracy {
            out.push_str(&format!(
                "accuracy@{}: {:.4} ({}/{}), majority baseline {:.4}\n",
                a.k_for_hit, a.overall, a.correct, a.total, a.baseline_majority
            ));
        }
        if let Some(e) = &self.extremes {
            out.push_str("hardest:\n");
            for (m, acc) in &e.bottom {
                out.push_str(&format!("  {m}\t{:.1}\n", 100.0 * acc));
            }
            out.push_str("easiest:\n");
            for (m, acc) in &e.top {
                out.push_str(&format!("  {m}\t{:.1}\n", 100.0 * acc));
            }
        }
        if let Some(f) = &self.frequencies {
            out.push_str(&format!(
                "{} markers, {} occurrences, {} above cap {}\n",
                f.rows.len(),
                f.total,
                f.markers_above_cap,
                f.cap
            ));
        }
        out
    }
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}

/// Out-of-fold top-1 accuracies of the shallow classifier under three views
/// of the same instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predictability {
    pub instances: usize,
    pub baseline_majority: f64,
    pub s2_only: f64,
    pub pair: f64,
    /// Pair features after second sentences are permuted within each marker.
    pub shuffled_pair: f64,
}

fn kfold_accuracy(instances: &[Instance], config: &KFoldConfig) -> Result<f64> {
    let preds = kfold_predictions(instances, config)?;
    let top: Vec<&[String]> = preds.iter().map(|p| p.top.as_slice()).collect();
    let gold: Vec<&str> = preds.iter().map(|p| p.gold.as_str()).collect();
    Ok(accuracy_report(&top, &gold, 1)?.overall)
}

/// Runs `config` in s2-only and pair mode, then in pair mode on a copy whose
/// second sentences were shuffled within labels using `shuffle_seed`.
pub fn shallow_predictability(
    instances: &[Instance],
    config: &KFoldConfig,
    shuffle_seed: u64,
) -> Result<Predictability> {
    let markers: Vec<&str> = instances.iter().map(|i| i.marker.as_str()).collect();
    let with_mode = |mode| KFoldConfig { mode, ..config.clone() };
    let shuffled = shuffle_within_labels(instances, shuffle_seed);
    Ok(Predictability {
        instances: instances.len(),
        baseline_majority: majority_baseline(&markers)?,
        s2_only: kfold_accuracy(instances, &with_mode(FeaturizationMode::S2Only))?,
        pair: kfold_accuracy(instances, &with_mode(FeaturizationMode::Pair))?,
        shuffled_pair: kfold_accuracy(&shuffled, &with_mode(FeaturizationMode::Pair))?,
    })
}
