//! Out-of-fold marker predictions.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{featurize, pair_featurize, FeatureConfig};
use super::model::LinearModel;
use super::train::{train, Example, TrainConfig};
use crate::error::{Error, Result};
use crate::extraction::Instance;
use crate::filtering::word_tokenize;

pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_TOP_K: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeaturizationMode {
    /// Second sentence (marker removed) only.
    S2Only,
    /// Both sentences with separate per-side features.
    Pair,
}

impl FromStr for FeaturizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s2_only" | "s2" => Ok(FeaturizationMode::S2Only),
            "pair" => Ok(FeaturizationMode::Pair),
            other => Err(Error::Argument(format!("unknown featurization mode {other:?}"))),
        }
    }
}

/// Lowercased word tokens used by the marker classifier.
pub fn classifier_tokens(sentence: &str) -> Vec<String> {
    word_tokenize(sentence).into_iter().map(|t| t.to_lowercase()).collect()
}

pub fn instance_features(instance: &Instance, mode: FeaturizationMode, config: &FeatureConfig) -> Result<Vec<u32>> {
    let s2 = classifier_tokens(&instance.s2_prime);
    match mode {
        FeaturizationMode::S2Only => Ok(featurize(&s2, config)),
        FeaturizationMode::Pair => pair_featurize(&classifier_tokens(&instance.s1), &s2, config),
    }
}

pub fn instance_examples(
    instances: &[Instance],
    mode: FeaturizationMode,
    config: &FeatureConfig,
) -> Result<Vec<Example>> {
    instances
        .iter()
        .map(|i| Ok(Example::new(instance_features(i, mode, config)?, i.marker.clone())))
        .collect()
}

/// Trains a marker classifier directly on instances.
pub fn train_on_instances(
    instances: &[Instance],
    mode: FeaturizationMode,
    features: &FeatureConfig,
    config: &TrainConfig,
) -> Result<LinearModel> {
    train(&instance_examples(instances, mode, features)?, features, config)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KFoldConfig {
    pub folds: usize,
    pub top_k: usize,
    pub mode: FeaturizationMode,
    /// Seeds the fold permutation; model seeds come from `train.seed`.
    pub seed: u64,
    pub features: FeatureConfig,
    pub train: TrainConfig,
}

impl Default for KFoldConfig {
    fn default() -> Self {
        KFoldConfig {
            folds: DEFAULT_FOLDS,
            top_k: DEFAULT_TOP_K,
            mode: FeaturizationMode::Pair,
            seed: 0,
            features: FeatureConfig::default().with_side_prefixing(true),
            train: TrainConfig::default(),
        }
    }
}

/// Prediction record for one input instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPrediction {
    pub index: usize,
    pub fold: usize,
    pub gold: String,
    pub top: Vec<String>,
}

/// Fold of every position: a seeded permutation dealt round-robin, so fold
/// sizes differ by at most one.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        folds[i] = rank % k;
    }
    folds
}

/// Predicts every instance with a model trained only on the other folds.
pub fn kfold_predictions(instances: &[Instance], config: &KFoldConfig) -> Result<Vec<FoldPrediction>> {
    let k = config.folds;
    if k < 2 {
        return Err(Error::Argument(format!("need at least 2 folds, got {k}")));
    }
    if instances.len() < k {
        return Err(Error::Argument(format!(
            "{} instances cannot fill {k} folds",
            instances.len()
        )));
    }
    if config.top_k < 1 {
        return Err(Error::Argument("top_k must be at least 1".into()));
    }
    let examples = instance_examples(instances, config.mode, &config.features)?;
    let folds = fold_assignment(instances.len(), k, config.seed);
    let mut out: Vec<Option<FoldPrediction>> = vec![None; instances.len()];
    for fold in 0..k {
        let training: Vec<Example> = examples
            .iter()
            .zip(&folds)
            .filter(|(_, &f)| f != fold)
            .map(|(e, _)| e.clone())
            .collect();
        let model = train(&training, &config.features, &config.train)?;
        for (i, _) in folds.iter().enumerate().filter(|(_, &f)| f == fold) {
            out[i] = Some(FoldPrediction {
                index: i,
                fold,
                gold: instances[i].marker.clone(),
                top: model.predict_topk(&examples[i].features, config.top_k),
            });
        }
    }
    Ok(out
        .into_iter()
        .map(|p| p.expect("every index belongs to a fold"))
        .collect())
}
