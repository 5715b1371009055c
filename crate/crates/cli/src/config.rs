//! Pipeline configuration: built-in defaults, overridden by a TOML file,
//! overridden by command-line flags.

use std::path::{Path, PathBuf};

use markermine::datasets::{Proportions, DEFAULT_CAP, DEFAULT_MIN_COUNT};
use markermine::filtering::{FilterConfig, LANGID_BUCKETS, LANGID_DIM, LANGID_EPOCHS};
use markermine::io::InstanceFormat;
use markermine::linclass::{
    FeatureConfig, FeaturizationMode, KFoldConfig, TrainConfig, DEFAULT_BUCKET_COUNT, DEFAULT_DIM, DEFAULT_EPOCHS,
    DEFAULT_FOLDS, DEFAULT_LR, DEFAULT_NGRAM_MAX, DEFAULT_TOP_K,
};
use markermine::tagger::{TaggerTrainConfig, DEFAULT_DICT_MIN_COUNT, DEFAULT_DICT_PURITY, DEFAULT_TAGGER_EPOCHS};
use markermine::Error;
use serde::{Deserialize, Serialize};

pub const ENV_CONFIG: &str = "MARKERMINE_CONFIG";
pub const ENV_LANGID: &str = "MARKERMINE_LANGID";
pub const ENV_TAGGER: &str = "MARKERMINE_TAGGER";
pub const ENV_PDTB: &str = "MARKERMINE_PDTB";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub threads: usize,
    /// Forces single-threaded execution everywhere.
    pub deterministic: bool,
    pub paths: PathsConfig,
    pub filter: FilterConfig,
    pub discover: DiscoverConfig,
    pub tagger: TaggerConfig,
    pub langid: LangidConfig,
    pub classifier: ClassifierConfig,
    pub kfold: KfoldSection,
    pub build: BuildConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            threads: 1,
            deterministic: false,
            paths: PathsConfig::default(),
            filter: FilterConfig::default(),
            discover: DiscoverConfig::default(),
            tagger: TaggerConfig::default(),
            langid: LangidConfig::default(),
            classifier: ClassifierConfig::default(),
            kfold: KfoldSection::default(),
            build: BuildConfig::default(),
        }
    }
}

/// Model and list locations. Unset entries fall back to the environment.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub langid: Option<PathBuf>,
    pub tagger: Option<PathBuf>,
    pub pdtb: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscoverConfig {
    pub min_count: u64,
    pub cap: u64,
}

impl Default for DiscoverConfig {
    fn default() -> Self {
        DiscoverConfig {
            min_count: DEFAULT_MIN_COUNT,
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerConfig {
    pub epochs: u32,
    pub dict_min_count: u32,
    pub dict_purity: f32,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        TaggerConfig {
            epochs: DEFAULT_TAGGER_EPOCHS,
            dict_min_count: DEFAULT_DICT_MIN_COUNT,
            dict_purity: DEFAULT_DICT_PURITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LangidConfig {
    pub buckets: u64,
    pub char_min: u32,
    pub char_max: u32,
    pub dim: usize,
    pub lr: f32,
    pub epochs: u32,
}

impl Default for LangidConfig {
    fn default() -> Self {
        LangidConfig {
            buckets: LANGID_BUCKETS,
            char_min: 1,
            char_max: 4,
            dim: LANGID_DIM,
            lr: DEFAULT_LR,
            epochs: LANGID_EPOCHS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub mode: FeaturizationMode,
    pub buckets: u64,
    pub ngrams: u32,
    pub dim: usize,
    pub lr: f32,
    pub epochs: u32,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            mode: FeaturizationMode::Pair,
            buckets: DEFAULT_BUCKET_COUNT,
            ngrams: DEFAULT_NGRAM_MAX,
            dim: DEFAULT_DIM,
            lr: DEFAULT_LR,
            epochs: DEFAULT_EPOCHS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KfoldSection {
    pub folds: usize,
    pub top_k: usize,
}

impl Default for KfoldSection {
    fn default() -> Self {
        KfoldSection {
            folds: DEFAULT_FOLDS,
            top_k: DEFAULT_TOP_K,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildConfig {
    pub scale: f64,
    pub per_marker: Option<usize>,
    pub proportions: Proportions,
    pub format: InstanceFormat,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            scale: 1.0,
            per_marker: None,
            proportions: Proportions::default(),
            format: InstanceFormat::Tsv,
        }
    }
}

impl PipelineConfig {
    /// Reads `path`, or the file named by the environment, or the defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, Error> {
        let from_env = std::env::var_os(ENV_CONFIG).map(PathBuf::from);
        let Some(path) = path.map(Path::to_path_buf).or(from_env) else {
            return Ok(PipelineConfig::default());
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.threads < 1 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        self.filter.validate()?;
        self.build.proportions.validate()?;
        self.classifier_features().validate()?;
        self.langid_features().validate()?;
        if self.kfold.folds < 2 || self.kfold.top_k < 1 {
            return Err(Error::Config("kfold needs folds >= 2 and top_k >= 1".into()));
        }
        if self.discover.cap < 1 || self.discover.min_count < 1 {
            return Err(Error::Config("discover cap and min_count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn effective_threads(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads
        }
    }

    pub fn classifier_features(&self) -> FeatureConfig {
        FeatureConfig::words(self.classifier.buckets, self.classifier.ngrams)
            .with_side_prefixing(self.classifier.mode == FeaturizationMode::Pair)
    }

    pub fn classifier_train(&self) -> TrainConfig {
        TrainConfig {
            dim: self.classifier.dim,
            lr: self.classifier.lr,
            epochs: self.classifier.epochs,
            seed: self.seed,
            labels: None,
            threads: self.effective_threads(),
        }
    }

    pub fn kfold_config(&self) -> KFoldConfig {
        KFoldConfig {
            folds: self.kfold.folds,
            top_k: self.kfold.top_k,
            mode: self.classifier.mode,
            seed: self.seed,
            features: self.classifier_features(),
            train: self.classifier_train(),
        }
    }

    pub fn langid_features(&self) -> FeatureConfig {
        FeatureConfig::chars(self.langid.buckets, self.langid.char_min, self.langid.char_max)
    }

    pub fn langid_train(&self) -> TrainConfig {
        TrainConfig {
            dim: self.langid.dim,
            lr: self.langid.lr,
            epochs: self.langid.epochs,
            seed: self.seed,
            labels: None,
            threads: 1,
        }
    }

    pub fn tagger_train(&self) -> TaggerTrainConfig {
        TaggerTrainConfig {
            epochs: self.tagger.epochs,
            seed: self.seed,
            dict_min_count: self.tagger.dict_min_count,
            dict_purity: self.tagger.dict_purity,
        }
    }
}

/// A path given as a flag, else in the config file, else in the environment.
pub fn resolve_path(flag: Option<&Path>, file: Option<&Path>, env: &str) -> Option<PathBuf> {
    flag.or(file)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(env).map(PathBuf::from))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_defaults() {
        assert_eq!(PipelineConfig::parse("").unwrap(), PipelineConfig::default());
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let cfg =
            PipelineConfig::parse("seed = 4\n[filter]\nmax_words = 20\n[classifier]\nmode = \"s2_only\"\n").unwrap();
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.filter.max_words, 20);
        assert_eq!(cfg.filter.min_words, 3);
        assert_eq!(cfg.classifier.mode, FeaturizationMode::S2Only);
        assert!(!cfg.classifier_features().side_prefixing);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PipelineConfig::parse("sede = 4\n").is_err());
        assert!(PipelineConfig::parse("[build]\nscal = 2.0\n").is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = PipelineConfig::default();
        cfg.build.per_marker = Some(7);
        cfg.paths.tagger = Some("m/tagger.dmpt".into());
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(PipelineConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn deterministic_forces_one_thread() {
        let cfg = PipelineConfig {
            threads: 8,
            deterministic: true,
            ..Default::default()
        };
        assert_eq!(cfg.effective_threads(), 1);
        assert_eq!(cfg.classifier_train().threads, 1);
    }
}
