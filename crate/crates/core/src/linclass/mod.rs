//! Hashed bag-of-n-grams linear classifier.
//!
//! One model type serves two roles: predicting discourse markers from word
//! n-grams, and identifying languages from character n-grams.

mod features;
pub mod grad;
mod kfold;
mod model;
mod train;

pub use features::{
    featurize, featurize_into, fnv1a, pair_featurize, FeatureConfig, Granularity, Side, DEFAULT_BUCKET_COUNT,
    DEFAULT_NGRAM_MAX,
};
pub use kfold::{
    classifier_tokens, fold_assignment, instance_examples, instance_features, kfold_predictions, train_on_instances,
    FeaturizationMode, FoldPrediction, KFoldConfig, DEFAULT_FOLDS, DEFAULT_TOP_K,
};
pub use model::{LinearModel, Prediction, TrainSnapshot, MODEL_FORMAT_VERSION, MODEL_MAGIC};
pub use train::{train, Example, TrainConfig, DEFAULT_DIM, DEFAULT_EPOCHS, DEFAULT_LR};
