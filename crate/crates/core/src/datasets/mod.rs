//! Subsampling, balanced dataset variants, splits and the shuffle perturbation.
//!
//! Six variants are supported. Let `b` be the base per-marker count (10000
//! times `scale` unless set explicitly):
//!
//! - `base`: exactly `b` instances of every marker.
//! - `hard`: drops instances whose marker is among the top-5 out-of-fold
//!   predictions, then samples like `base`.
//! - `shuffled`: `base`, with second sentences permuted within each marker
//!   separately in every split.
//! - `adv`: `base` restricted to markers the tagging rule found.
//! - `ten`: the 10 most frequent markers, `markers * b / 10` each, so the total
//!   matches `base`.
//! - `big`: `2b` per marker, tolerating shortfall with a warning.

mod sampling;
mod split;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use sampling::{apply_min_count, cap_subsample, derive_seed, CapSampler, DEFAULT_CAP, DEFAULT_MIN_COUNT};
pub use split::{shuffle_within_labels, split_dataset, DatasetSplit, Proportions};

use crate::error::{Error, Result};
use crate::extraction::{Instance, MarkerLexicon};
use crate::io::{write_instances, InstanceFormat};
use sampling::balanced_sample;

pub const MANIFEST_VERSION: u32 = 1;
pub const BASE_PER_MARKER: usize = 10_000;
pub const TEN_MARKERS: usize = 10;
pub const HARD_TOP_K: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Base,
    Hard,
    Shuffled,
    Adv,
    Ten,
    Big,
}

impl VariantKind {
    pub const ALL: [VariantKind; 6] = [
        VariantKind::Base,
        VariantKind::Hard,
        VariantKind::Shuffled,
        VariantKind::Adv,
        VariantKind::Ten,
        VariantKind::Big,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VariantKind::Base => "base",
            VariantKind::Hard => "hard",
            VariantKind::Shuffled => "shuffled",
            VariantKind::Adv => "adv",
            VariantKind::Ten => "ten",
            VariantKind::Big => "big",
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VariantKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s || (s == "10" && *k == VariantKind::Ten))
            .ok_or_else(|| Error::Argument(format!("unknown variant {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub kind: VariantKind,
    /// Base per-marker count `b`; overrides `BASE_PER_MARKER * scale`.
    pub per_marker: Option<usize>,
    /// Desk-scale multiplier on every nominal count.
    pub scale: f64,
    pub seed: u64,
}

impl VariantSpec {
    pub fn new(kind: VariantKind, seed: u64) -> Self {
        VariantSpec {
            kind,
            per_marker: None,
            scale: 1.0,
            seed,
        }
    }

    pub fn with_per_marker(mut self, per_marker: usize) -> Self {
        self.per_marker = Some(per_marker);
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// The base per-marker count after scaling.
    pub fn base_per_marker(&self) -> Result<usize> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Argument(format!("scale must be positive, got {}", self.scale)));
        }
        let b = self
            .per_marker
            .unwrap_or_else(|| (BASE_PER_MARKER as f64 * self.scale).round() as usize);
        if b < 1 {
            return Err(Error::Argument(format!(
                "per-marker count is zero after scaling by {}",
                self.scale
            )));
        }
        Ok(b)
    }
}

/// Inputs some variants need beyond the instances themselves.
#[derive(Clone, Copy, Debug, Default)]
pub struct VariantAux<'a> {
    /// Marker origins (`adv`) and pre-cap frequencies (`ten`).
    pub lexicon: Option<&'a MarkerLexicon>,
    /// Top-k out-of-fold predictions aligned with the instances (`hard`).
    pub predictions: Option<&'a [Vec<String>]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantManifest {
    pub kind: VariantKind,
    pub scale: f64,
    pub seed: u64,
    pub nominal_per_marker: usize,
    pub base_per_marker: usize,
    /// Target count of every selected marker.
    pub per_marker: usize,
    pub input_instances: usize,
    pub removed_by_hard_filter: Option<usize>,
    pub markers: Vec<String>,
    pub counts: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub instances: Vec<Instance>,
    pub manifest: VariantManifest,
}

fn deficiency_error(kind: VariantKind, want: usize, short: &[(String, usize)]) -> Error {
    let list: Vec<String> = short.iter().map(|(m, n)| format!("{m} ({n}/{want})")).collect();
    Error::Build(format!(
        "{kind}: {} marker(s) lack {want} instances: {}",
        short.len(),
        list.join(", ")
    ))
}

fn distinct_markers(instances: &[Instance]) -> Vec<String> {
    instances
        .iter()
        .map(|i| i.marker.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Builds one variant. `shuffled` is sampled like `base` here; its
/// perturbation is applied per split by [`build_dataset`].
pub fn build_variant(instances: &[Instance], spec: &VariantSpec, aux: &VariantAux<'_>) -> Result<Dataset> {
    let b = spec.base_per_marker()?;
    let base_markers = distinct_markers(instances);
    let mut pool: Vec<Instance> = instances.to_vec();
    let mut removed_by_hard = None;
    let mut warnings = Vec::new();

    let per_marker = match spec.kind {
        VariantKind::Base | VariantKind::Shuffled => b,
        VariantKind::Hard => {
            let predictions = aux
                .predictions
                .ok_or_else(|| Error::Argument("hard variant needs out-of-fold predictions".into()))?;
            if predictions.len() != instances.len() {
                return Err(Error::Argument(format!(
                    "{} predictions for {} instances",
                    predictions.len(),
                    instances.len()
                )));
            }
            pool = instances
                .iter()
                .zip(predictions)
                .filter(|(inst, top)| !top.iter().take(HARD_TOP_K).any(|m| *m == inst.marker))
                .map(|(inst, _)| inst.clone())
                .collect();
            removed_by_hard = Some(instances.len() - pool.len());
            b
        }
        VariantKind::Adv => {
            let lexicon = aux
                .lexicon
                .ok_or_else(|| Error::Argument("adv variant needs the marker lexicon".into()))?;
            let kept: HashSet<&str> = lexicon
                .entries
                .iter()
                .filter(|e| e.origin.is_discovered())
                .map(|e| e.form.as_str())
                .collect();
            pool.retain(|i| kept.contains(i.marker.as_str()));
            b
        }
        VariantKind::Ten => {
            let lexicon = aux
                .lexicon
                .ok_or_else(|| Error::Argument("ten variant needs the marker lexicon".into()))?;
            let present: HashSet<&str> = base_markers.iter().map(String::as_str).collect();
            // lexicon order is descending count, then form
            let top: HashSet<&str> = lexicon
                .forms()
                .filter(|f| present.contains(f))
                .take(TEN_MARKERS)
                .collect();
            if top.len() < TEN_MARKERS {
                return Err(Error::Build(format!(
                    "ten: only {} markers available, need {TEN_MARKERS}",
                    top.len()
                )));
            }
            pool.retain(|i| top.contains(i.marker.as_str()));
            base_markers.len() * b / TEN_MARKERS
        }
        VariantKind::Big => 2 * b,
    };
    if per_marker < 1 {
        return Err(Error::Build(format!("{}: per-marker count rounds to zero", spec.kind)));
    }

    let (sample, short) = balanced_sample(&pool, spec.seed, |_| per_marker);
    // hard must keep every base marker
    let mut short = short;
    if spec.kind == VariantKind::Hard {
        let survivors: HashSet<&str> = pool.iter().map(|i| i.marker.as_str()).collect();
        short.extend(
            base_markers
                .iter()
                .filter(|m| !survivors.contains(m.as_str()))
                .map(|m| (m.clone(), 0)),
        );
        short.sort();
    }
    if !short.is_empty() {
        if spec.kind == VariantKind::Big {
            for (m, n) in &short {
                warnings.push(format!("big: marker {m} has {n} of {per_marker} instances"));
            }
        } else {
            return Err(deficiency_error(spec.kind, per_marker, &short));
        }
    }
    if sample.is_empty() {
        return Err(Error::Build(format!("{}: no instances selected", spec.kind)));
    }

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for i in &sample {
        *counts.entry(i.marker.clone()).or_default() += 1;
    }
    let nominal_per_marker = match spec.kind {
        VariantKind::Big => 2 * BASE_PER_MARKER,
        VariantKind::Ten => base_markers.len() * BASE_PER_MARKER / TEN_MARKERS,
        _ => BASE_PER_MARKER,
    };
    Ok(Dataset {
        manifest: VariantManifest {
            kind: spec.kind,
            scale: spec.scale,
            seed: spec.seed,
            nominal_per_marker,
            base_per_marker: b,
            per_marker,
            input_instances: instances.len(),
            removed_by_hard_filter: removed_by_hard,
            markers: counts.keys().cloned().collect(),
            counts,
            warnings,
        },
        instances: sample,
    })
}

/// Everything needed to regenerate a dataset directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub manifest_version: u32,
    pub variant: VariantManifest,
    pub proportions: Proportions,
    pub split_seed: u64,
    pub shuffle_seed: Option<u64>,
    /// `[train, valid, test]` counts per marker.
    pub split_counts: BTreeMap<String, [usize; 3]>,
    /// Input file name to SHA-256, filled in by the caller.
    pub sources: BTreeMap<String, String>,
    /// Free-form configuration snapshot, filled in by the caller.
    pub config: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuiltDataset {
    pub split: DatasetSplit,
    pub manifest: DatasetManifest,
}

/// Builds a variant, splits it, and applies the shuffle perturbation to every
/// split part of the `shuffled` variant.
pub fn build_dataset(
    instances: &[Instance],
    spec: &VariantSpec,
    aux: &VariantAux<'_>,
    proportions: &Proportions,
) -> Result<BuiltDataset> {
    let dataset = build_variant(instances, spec, aux)?;
    let split_seed = derive_seed(spec.seed, "split");
    let mut split = split_dataset(&dataset.instances, proportions, split_seed)?;
    let shuffle_seed = (spec.kind == VariantKind::Shuffled).then(|| derive_seed(spec.seed, "shuffle"));
    if let Some(seed) = shuffle_seed {
        split = DatasetSplit {
            train: shuffle_within_labels(&split.train, derive_seed(seed, "train")),
            valid: shuffle_within_labels(&split.valid, derive_seed(seed, "valid")),
            test: shuffle_within_labels(&split.test, derive_seed(seed, "test")),
        };
    }
    let mut split_counts: BTreeMap<String, [usize; 3]> = BTreeMap::new();
    for (k, (_, part)) in split.parts().iter().enumerate() {
        for i in part.iter() {
            split_counts.entry(i.marker.clone()).or_default()[k] += 1;
        }
    }
    Ok(BuiltDataset {
        manifest: DatasetManifest {
            manifest_version: MANIFEST_VERSION,
            variant: dataset.manifest,
            proportions: *proportions,
            split_seed,
            shuffle_seed,
            split_counts,
            sources: BTreeMap::new(),
            config: serde_json::Value::Null,
        },
        split,
    })
}

/// Writes `train/valid/test` instance files, `markers.txt` and `manifest.json`.
pub fn write_dataset_dir(dir: &Path, built: &BuiltDataset, format: InstanceFormat) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let ext = match format {
        InstanceFormat::Tsv => "tsv",
        InstanceFormat::Jsonl => "jsonl",
    };
    for (name, part) in built.split.parts() {
        let path = dir.join(format!("{name}.{ext}"));
        let file = fs::File::create(&path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        write_instances(std::io::BufWriter::new(file), part, format)?;
    }
    let markers: String = built
        .manifest
        .variant
        .markers
        .iter()
        .map(|m| format!("{m}\n"))
        .collect();
    let write = |name: &str, text: &str| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
    };
    write("markers.txt", &markers)?;
    let manifest = serde_json::to_string_pretty(&built.manifest).map_err(|e| Error::Format(e.to_string()))?;
    write("manifest.json", &(manifest + "\n"))
}
