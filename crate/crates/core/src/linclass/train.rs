use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::FeatureConfig;
use super::grad::{example_gradient, sgd_step};
use super::model::{LinearModel, TrainSnapshot};
use crate::error::{Error, Result};

pub const DEFAULT_DIM: usize = 100;
pub const DEFAULT_LR: f32 = 0.5;
pub const DEFAULT_EPOCHS: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub dim: usize,
    pub lr: f32,
    pub epochs: u32,
    pub seed: u64,
    /// Fixed label table. When unset, the sorted set of training labels is used.
    pub labels: Option<Vec<String>>,
    /// 1 trains deterministically on the calling thread. Larger values run
    /// lock-free concurrent updates with no bit-reproducibility guarantee.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: DEFAULT_DIM,
            lr: DEFAULT_LR,
            epochs: DEFAULT_EPOCHS,
            seed: 0,
            labels: None,
            threads: 1,
        }
    }
}

/// One training example: hashed feature ids and a label.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub features: Vec<u32>,
    pub label: String,
}

impl Example {
    pub fn new(features: Vec<u32>, label: impl Into<String>) -> Self {
        Example {
            features,
            label: label.into(),
        }
    }
}

/// Trains a linear model on `examples` in the given order.
///
/// The input table starts uniform in `[-1/dim, 1/dim]` and the output table at
/// zero. The learning rate decays linearly from `lr` to zero over
/// `epochs * examples.len()` updates.
pub fn train(examples: &[Example], features: &FeatureConfig, config: &TrainConfig) -> Result<LinearModel> {
    features.validate()?;
    if examples.is_empty() {
        return Err(Error::Training("no training instances".into()));
    }
    if config.dim == 0 || config.epochs == 0 {
        return Err(Error::Argument("dim and epochs must be positive".into()));
    }
    if !(config.lr.is_finite() && config.lr > 0.0) {
        return Err(Error::Argument(format!("learning rate {} is not positive", config.lr)));
    }
    let labels: Vec<String> = match &config.labels {
        Some(labels) => labels.clone(),
        None => examples
            .iter()
            .map(|e| e.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut targets = Vec::with_capacity(examples.len());
    for ex in examples {
        match index.get(ex.label.as_str()) {
            Some(&i) => targets.push(i),
            None => {
                return Err(Error::Training(format!(
                    "label {:?} is not in the label table",
                    ex.label
                )))
            }
        }
        if let Some(&bad) = ex.features.iter().find(|&&id| u64::from(id) >= features.bucket_count) {
            return Err(Error::Training(format!(
                "feature id {bad} out of range for {} buckets",
                features.bucket_count
            )));
        }
    }

    let dim = config.dim;
    let buckets = features.bucket_count as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 1.0 / dim as f32;
    let mut input: Vec<f32> = (0..buckets * dim).map(|_| rng.random_range(-bound..=bound)).collect();
    let mut output = vec![0.0f32; labels.len() * dim];

    let total = examples.len() as u64 * u64::from(config.epochs);
    if config.threads <= 1 {
        let mut done = 0u64;
        for _ in 0..config.epochs {
            for (ex, &target) in examples.iter().zip(&targets) {
                let lr = config.lr * (1.0 - done as f32 / total as f32);
                sgd_step(&mut input, &mut output, dim, &ex.features, target, lr);
                done += 1;
            }
        }
    } else {
        let shared = HogwildTables::new(&input, &output, dim);
        shared.run(examples, &targets, config, total);
        (input, output) = shared.into_tables();
    }

    LinearModel::from_parts(
        features.clone(),
        dim,
        input,
        output,
        labels,
        TrainSnapshot {
            lr: config.lr,
            epochs: config.epochs,
            seed: config.seed,
        },
    )
    .map_err(|e| Error::Training(format!("training diverged: {e}")))
}

/// Shared weight tables for concurrent training. Each weight is an `f32`
/// stored in an `AtomicU32`; reads and writes are relaxed and updates from
/// different threads may overwrite each other.
struct HogwildTables {
    input: Vec<AtomicU32>,
    output: Vec<AtomicU32>,
    dim: usize,
    progress: AtomicU64,
}

#[inline]
fn load(cell: &AtomicU32) -> f32 {
    f32::from_bits(cell.load(Ordering::Relaxed))
}

#[inline]
fn add(cell: &AtomicU32, delta: f32) {
    cell.store((load(cell) + delta).to_bits(), Ordering::Relaxed);
}

impl HogwildTables {
    fn new(input: &[f32], output: &[f32], dim: usize) -> Self {
        let wrap = |t: &[f32]| t.iter().map(|w| AtomicU32::new(w.to_bits())).collect();
        HogwildTables {
            input: wrap(input),
            output: wrap(output),
            dim,
            progress: AtomicU64::new(0),
        }
    }

    fn run(&self, examples: &[Example], targets: &[usize], config: &TrainConfig, total: u64) {
        let threads = config.threads.min(examples.len()).max(1);
        let worker = |exs: &[Example], tgts: &[usize]| {
            let mut output = vec![0.0f32; self.output.len()];
            for _ in 0..config.epochs {
                for (ex, &target) in exs.iter().zip(tgts) {
                    let done = self.progress.fetch_add(1, Ordering::Relaxed);
                    let lr = config.lr * (1.0 - (done as f32 / total as f32).min(1.0));
                    self.step(&ex.features, target, lr, &mut output);
                }
            }
        };
        // no thread for the single-worker case; wasm has none to give
        if threads == 1 {
            worker(examples, targets);
            return;
        }
        let chunk = examples.len().div_ceil(threads);
        std::thread::scope(|scope| {
            for (exs, tgts) in examples.chunks(chunk).zip(targets.chunks(chunk)) {
                scope.spawn(move || worker(exs, tgts));
            }
        });
    }

    fn step(&self, ids: &[u32], target: usize, lr: f32, output: &mut [f32]) {
        let dim = self.dim;
        let mut hidden = vec![0.0f32; dim];
        for &id in ids {
            let row = &self.input[id as usize * dim..(id as usize + 1) * dim];
            for (h, w) in hidden.iter_mut().zip(row) {
                *h += load(w);
            }
        }
        if !ids.is_empty() {
            let inv = 1.0 / ids.len() as f32;
            hidden.iter_mut().for_each(|h| *h *= inv);
        }
        for (local, cell) in output.iter_mut().zip(&self.output) {
            *local = load(cell);
        }
        let g = example_gradient(&hidden, output, target);
        for (j, &sg) in g.score_grad.iter().enumerate() {
            let row = &self.output[j * dim..(j + 1) * dim];
            for (cell, &h) in row.iter().zip(&hidden) {
                add(cell, -lr * sg * h);
            }
        }
        if !ids.is_empty() {
            let scale = lr / ids.len() as f32;
            for &id in ids {
                let row = &self.input[id as usize * dim..(id as usize + 1) * dim];
                for (cell, &hg) in row.iter().zip(&g.hidden_grad) {
                    add(cell, -scale * hg);
                }
            }
        }
    }

    fn into_tables(self) -> (Vec<f32>, Vec<f32>) {
        let unwrap = |t: Vec<AtomicU32>| t.into_iter().map(|c| f32::from_bits(c.into_inner())).collect();
        (unwrap(self.input), unwrap(self.output))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linclass::features::featurize;

    fn separable(n: usize) -> Vec<Example> {
        let cfg = FeatureConfig::words(1 << 12, 1);
        (0..n)
            .map(|i| {
                let (marker, label) = if i % 2 == 0 { ("alpha", "a") } else { ("beta", "b") };
                let filler = format!("w{}", i % 7);
                Example::new(featurize(&[marker, filler.as_str()], &cfg), label)
            })
            .collect()
    }

    #[test]
    fn single_label_predicts_certainty() {
        let cfg = FeatureConfig::words(64, 1);
        let ex = vec![Example::new(featurize(&["x"], &cfg), "L")];
        let m = train(&ex, &cfg, &TrainConfig::default()).unwrap();
        assert_eq!(m.labels(), ["L"]);
        assert!((m.predict(&featurize(&["y"], &cfg))[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_training_set_fails() {
        let cfg = FeatureConfig::words(64, 1);
        assert!(matches!(
            train(&[], &cfg, &TrainConfig::default()),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn unknown_label_fails() {
        let cfg = FeatureConfig::words(64, 1);
        let ex = vec![Example::new(vec![1], "z")];
        let tc = TrainConfig {
            labels: Some(vec!["a".into()]),
            ..Default::default()
        };
        assert!(matches!(train(&ex, &cfg, &tc), Err(Error::Training(_))));
    }

    #[test]
    fn deterministic_training_is_bit_identical() {
        let cfg = FeatureConfig::words(1 << 12, 1);
        let ex = separable(60);
        let tc = TrainConfig {
            dim: 8,
            seed: 42,
            ..Default::default()
        };
        let a = train(&ex, &cfg, &tc).unwrap();
        let b = train(&ex, &cfg, &tc).unwrap();
        let (mut ba, mut bb) = (Vec::new(), Vec::new());
        a.write_to(&mut ba).unwrap();
        b.write_to(&mut bb).unwrap();
        assert_eq!(ba, bb);
        let c = train(&ex, &cfg, &TrainConfig { seed: 43, ..tc }).unwrap();
        assert_ne!(a.input_table(), c.input_table());
    }

    #[test]
    fn initialization_range() {
        let cfg = FeatureConfig::words(256, 1);
        let ex = vec![Example::new(vec![], "a")];
        let m = train(
            &ex,
            &cfg,
            &TrainConfig {
                dim: 4,
                ..Default::default()
            },
        )
        .unwrap();
        // empty feature list never touches the input table
        assert!(m.input_table().iter().all(|w| w.abs() <= 0.25));
        assert!(m.input_table().iter().any(|w| *w != 0.0));
    }

    #[test]
    fn parallel_matches_serial_accuracy() {
        let cfg = FeatureConfig::words(1 << 12, 1);
        let ex = separable(400);
        let acc = |m: &LinearModel| {
            ex.iter()
                .filter(|e| m.predict_topk(&e.features, 1)[0] == e.label)
                .count() as f64
                / ex.len() as f64
        };
        let serial = train(
            &ex,
            &cfg,
            &TrainConfig {
                dim: 16,
                ..Default::default()
            },
        )
        .unwrap();
        let parallel = train(
            &ex,
            &cfg,
            &TrainConfig {
                dim: 16,
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((acc(&serial) - acc(&parallel)).abs() <= 0.01);
    }
}
