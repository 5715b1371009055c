use std::cmp::Ordering;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::features::{FeatureConfig, Granularity};
use super::grad::{mean_rows, scores, softmax_in_place};
use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"DMLC";
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Hyper-parameters a model was trained with, kept for provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSnapshot {
    pub lr: f32,
    pub epochs: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub label: String,
    pub probability: f64,
}

/// Averaged-embedding linear classifier over hashed n-gram buckets.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    config: FeatureConfig,
    dim: usize,
    input: Vec<f32>,
    output: Vec<f32>,
    labels: Vec<String>,
    snapshot: TrainSnapshot,
}

impl LinearModel {
    /// Assembles a model from raw row-major tables, checking every invariant.
    pub fn from_parts(
        config: FeatureConfig,
        dim: usize,
        input: Vec<f32>,
        output: Vec<f32>,
        labels: Vec<String>,
        snapshot: TrainSnapshot,
    ) -> Result<Self> {
        config.validate()?;
        if dim == 0 {
            return Err(Error::Config("dim must be positive".into()));
        }
        if labels.is_empty() {
            return Err(Error::Config("a model needs at least one label".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Config(format!("duplicate label {dup:?}")));
        }
        let want_in = config.bucket_count as usize * dim;
        if input.len() != want_in || output.len() != labels.len() * dim {
            return Err(Error::Config(format!(
                "table shapes ({}, {}) do not match buckets={} labels={} dim={dim}",
                input.len(),
                output.len(),
                config.bucket_count,
                labels.len()
            )));
        }
        if input.iter().chain(&output).any(|w| !w.is_finite()) {
            return Err(Error::Config("model contains non-finite weights".into()));
        }
        Ok(LinearModel {
            config,
            dim,
            input,
            output,
            labels,
            snapshot,
        })
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn train_snapshot(&self) -> TrainSnapshot {
        self.snapshot
    }

    pub fn input_table(&self) -> &[f32] {
        &self.input
    }

    pub fn output_table(&self) -> &[f32] {
        &self.output
    }

    /// Output-table row of label `index`.
    pub fn label_row(&self, index: usize) -> &[f32] {
        &self.output[index * self.dim..(index + 1) * self.dim]
    }

    /// Probability of every label, in label-table order.
    pub fn probabilities(&self, feature_ids: &[u32]) -> Vec<f64> {
        let hidden: Vec<f64> = mean_rows(&self.input, self.dim, feature_ids)
            .into_iter()
            .map(f64::from)
            .collect();
        let output: Vec<f64> = self.output.iter().map(|&w| f64::from(w)).collect();
        let mut probs = scores(&hidden, &output);
        softmax_in_place(&mut probs);
        probs
    }

    pub fn predict(&self, feature_ids: &[u32]) -> Vec<Prediction> {
        self.probabilities(feature_ids)
            .into_iter()
            .zip(&self.labels)
            .map(|(probability, label)| Prediction {
                label: label.clone(),
                probability,
            })
            .collect()
    }

    /// The `k` most probable labels; exact ties go to the lexicographically
    /// smaller label.
    pub fn predict_topk(&self, feature_ids: &[u32], k: usize) -> Vec<String> {
        let probs = self.probabilities(feature_ids);
        let mut order: Vec<usize> = (0..self.labels.len()).collect();
        order.sort_by(|&a, &b| {
            probs[b]
                .partial_cmp(&probs[a])
                .unwrap_or(Ordering::Equal)
                .then_with(|| self.labels[a].cmp(&self.labels[b]))
        });
        order.into_iter().take(k).map(|i| self.labels[i].clone()).collect()
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = Writer::new(w);
        out.bytes(MODEL_MAGIC)?;
        out.u32(MODEL_FORMAT_VERSION)?;
        out.u64(self.config.bucket_count)?;
        out.u32(self.config.ngram_max)?;
        out.u8(match self.config.granularity {
            Granularity::Word => 0,
            Granularity::Char => 1,
        })?;
        out.u32(self.config.char_ngram_min)?;
        out.u32(self.config.char_ngram_max)?;
        out.u8(self.config.side_prefixing as u8)?;
        out.u32(self.dim as u32)?;
        out.f32(self.snapshot.lr)?;
        out.u32(self.snapshot.epochs)?;
        out.u64(self.snapshot.seed)?;
        out.u32(self.labels.len() as u32)?;
        for label in &self.labels {
            out.string(label)?;
        }
        out.f32_slice(&self.input)?;
        out.f32_slice(&self.output)?;
        out.finish()
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut input = Reader::new(r);
        let magic = input.array::<4>()?;
        if &magic != MODEL_MAGIC {
            return Err(Error::Format("not a linear model file (bad magic)".into()));
        }
        let version = input.u32()?;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported linear model version {version}")));
        }
        let bucket_count = input.u64()?;
        let ngram_max = input.u32()?;
        let granularity = match input.u8()? {
            0 => Granularity::Word,
            1 => Granularity::Char,
            g => return Err(Error::Format(format!("unknown granularity code {g}"))),
        };
        let char_ngram_min = input.u32()?;
        let char_ngram_max = input.u32()?;
        let side_prefixing = input.u8()? != 0;
        let config = FeatureConfig {
            bucket_count,
            ngram_max,
            granularity,
            char_ngram_min,
            char_ngram_max,
            side_prefixing,
        };
        config.validate().map_err(|e| Error::Format(e.to_string()))?;
        let dim = input.u32()? as usize;
        let snapshot = TrainSnapshot {
            lr: input.f32()?,
            epochs: input.u32()?,
            seed: input.u64()?,
        };
        let n_labels = input.u32()? as usize;
        let labels = (0..n_labels).map(|_| input.string()).collect::<Result<Vec<_>>>()?;
        let input_table = input.f32_vec(bucket_count as usize * dim)?;
        let output_table = input.f32_vec(n_labels * dim)?;
        input.expect_eof()?;
        LinearModel::from_parts(config, dim, input_table, output_table, labels, snapshot)
            .map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
        Self::read_from(std::io::BufReader::new(file))
    }
}
