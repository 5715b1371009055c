use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use markermine::datasets::VariantKind;

#[derive(Debug, Parser)]
#[command(name = "markermine", about = "Mine discourse-marker datasets from raw text")]
pub struct Cli {
    /// TOML configuration file; defaults to $MARKERMINE_CONFIG when set.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for shard processing and classifier training.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Single-threaded, seeded execution with byte-identical outputs.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split documents into sentence pairs and keep the clean ones.
    Filter(FilterArgs),
    /// Extract marker instances and count markers.
    Discover(DiscoverArgs),
    /// Train the part-of-speech tagger on a word_TAG corpus.
    TaggerTrain(TaggerTrainArgs),
    /// Train the language identifier on `label TAB text` lines.
    LangidTrain(LangidTrainArgs),
    /// Train a marker classifier on instances.
    ClassifyTrain(ClassifyTrainArgs),
    /// Score a marker classifier on instances.
    ClassifyEval(ClassifyEvalArgs),
    /// Out-of-fold top-k marker predictions.
    Kfold(KfoldArgs),
    /// Build one dataset variant directory.
    Build(BuildArgs),
    /// Permute second sentences within each marker.
    Shuffle(ShuffleArgs),
    /// Marker frequency table from a discovery frequency file.
    Stats(StatsArgs),
    /// Accuracy report from out-of-fold predictions.
    Report(ReportArgs),
    /// Unit-normalized marker vectors of a classifier.
    ExportEmbeddings(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    /// One document per line.
    Docs,
    /// `s1 TAB s2 [TAB source]` per line.
    Pairs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Jsonl,
}

impl From<Format> for markermine::io::InstanceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Tsv => markermine::io::InstanceFormat::Tsv,
            Format::Jsonl => markermine::io::InstanceFormat::Jsonl,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pair,
    S2,
}

impl From<Mode> for markermine::linclass::FeaturizationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Pair => markermine::linclass::FeaturizationMode::Pair,
            Mode::S2 => markermine::linclass::FeaturizationMode::S2Only,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Base,
    Hard,
    Shuffled,
    Adv,
    #[value(alias = "10")]
    Ten,
    Big,
}

impl From<Variant> for VariantKind {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Base => VariantKind::Base,
            Variant::Hard => VariantKind::Hard,
            Variant::Shuffled => VariantKind::Shuffled,
            Variant::Adv => VariantKind::Adv,
            Variant::Ten => VariantKind::Ten,
            Variant::Big => VariantKind::Big,
        }
    }
}

#[derive(Debug, Args)]
pub struct FilterOptions {
    #[arg(long)]
    pub min_words: Option<usize>,
    #[arg(long)]
    pub max_words: Option<usize>,
    /// Minimum English probability; a sentence must exceed it.
    #[arg(long)]
    pub english_threshold: Option<f64>,
    #[arg(long)]
    pub lowercase_ratio: Option<f64>,
    /// Accept sentences with unbalanced brackets or quotes.
    #[arg(long)]
    pub no_balance_check: bool,
}

#[derive(Debug, Args)]
pub struct ClassifierOptions {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub buckets: Option<u64>,
    /// Longest word n-gram.
    #[arg(long)]
    pub ngrams: Option<u32>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub lr: Option<f32>,
    #[arg(long)]
    pub epochs: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Input shards; each is processed independently.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "docs")]
    pub input_kind: InputKind,
    /// Accepted pairs as `s1 TAB s2 TAB source`.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Rejection statistics JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Language identifier model; defaults to $MARKERMINE_LANGID.
    #[arg(long)]
    pub langid: Option<PathBuf>,
    #[command(flatten)]
    pub filter: FilterOptions,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "pairs")]
    pub input_kind: InputKind,
    /// Instance file.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Lexicon TSV of markers meeting the minimum count.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Pre-cap marker frequencies as JSON.
    #[arg(long)]
    pub frequencies: Option<PathBuf>,
    /// Discovery statistics JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Tagger model; defaults to $MARKERMINE_TAGGER.
    #[arg(long)]
    pub tagger: Option<PathBuf>,
    /// Seed connective list, one form per line; defaults to the bundled list.
    #[arg(long)]
    pub pdtb: Option<PathBuf>,
    /// Filter pairs with this language identifier first.
    #[arg(long)]
    pub langid: Option<PathBuf>,
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Per-marker cap applied by reservoir sampling.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub filter: FilterOptions,
}

#[derive(Debug, Args)]
pub struct TaggerTrainArgs {
    /// Corpus of `word_TAG` tokens, one sentence per line.
    pub corpus: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long)]
    pub epochs: Option<u32>,
}

#[derive(Debug, Args)]
pub struct LangidTrainArgs {
    /// `label TAB text` lines.
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long)]
    pub epochs: Option<u32>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub buckets: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ClassifyTrainArgs {
    pub instances: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub classifier: ClassifierOptions,
}

#[derive(Debug, Args)]
pub struct ClassifyEvalArgs {
    pub instances: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    /// A prediction counts as a hit when gold is among its first k labels.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Markers listed at each end of the per-marker ranking.
    #[arg(long, default_value_t = 10)]
    pub extremes: usize,
    /// Report JSON.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KfoldArgs {
    pub instances: PathBuf,
    /// Predictions as `index TAB fold TAB gold TAB top1,top2,...`.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, short)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub classifier: ClassifierOptions,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(value_enum)]
    pub variant: Variant,
    pub instances: PathBuf,
    /// Output directory.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Out-of-fold predictions for the instances; required by `hard`.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Lexicon TSV; required by `adv` and `ten`.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Multiplier on the nominal per-marker counts.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Base per-marker count; overrides the scaled nominal count.
    #[arg(long)]
    pub per_marker: Option<usize>,
    /// Train, valid and test shares, comma-separated.
    #[arg(long, value_name = "T,V,E")]
    pub split: Option<String>,
    /// Format of the instance file and of the written splits.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ShuffleArgs {
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Frequency JSON written by `discover --frequencies`.
    pub frequencies: PathBuf,
    #[arg(long)]
    pub cap: Option<u64>,
    /// Frequency table as TSV.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
    /// Report JSON.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Prediction file written by `kfold`.
    pub predictions: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub extremes: usize,
    /// Frequency JSON to include.
    #[arg(long)]
    pub frequencies: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub model: PathBuf,
    /// `label TAB v1 ... vdim` lines.
    #[arg(long, short)]
    pub output: PathBuf,
}
