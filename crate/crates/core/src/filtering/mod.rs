//! Sentence-pair quality filters.

mod tokenize;

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use tokenize::{split_sentences, word_count, word_tokenize, ABBREVIATIONS};

use crate::error::{Error, Result};
use crate::linclass::{featurize, train, Example, FeatureConfig, Granularity, LinearModel, TrainConfig};

/// Label the language identifier must carry for English.
pub const ENGLISH_LABEL: &str = "en";

/// Two consecutive sentences from a corpus stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentencePair {
    pub s1: String,
    pub s2: String,
    pub source: Option<String>,
}

impl SentencePair {
    /// Builds a pair from raw text: tabs and newlines become spaces, curly
    /// quotes become straight quotes and surrounding whitespace is trimmed.
    pub fn ingest(s1: &str, s2: &str) -> Self {
        SentencePair {
            s1: normalize_text(s1),
            s2: normalize_text(s2),
            source: None,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    fn is_well_formed(&self) -> bool {
        [&self.s1, &self.s2]
            .iter()
            .all(|s| !s.trim().is_empty() && !s.contains(['\t', '\n', '\r']))
    }
}

/// Ingestion normalization applied to every sentence.
pub fn normalize_text(text: &str) -> String {
    let mapped: String = text
        .chars()
        .map(|c| match c {
            '\t' | '\n' | '\r' => ' ',
            '\u{201c}' | '\u{201d}' | '\u{201e}' | '\u{201f}' => '"',
            '\u{2018}' | '\u{2019}' | '\u{201a}' | '\u{201b}' => '\'',
            c => c,
        })
        .collect();
    mapped.trim().to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub min_words: usize,
    pub max_words: usize,
    pub english_threshold: f64,
    pub lowercase_ratio: f64,
    pub require_balanced: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_words: 3,
            max_words: 32,
            english_threshold: 0.75,
            lowercase_ratio: 0.9,
            require_balanced: true,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_words < 1 || self.min_words > self.max_words {
            return Err(Error::Config(format!(
                "word bounds [{}, {}] are invalid",
                self.min_words, self.max_words
            )));
        }
        for (name, v) in [
            ("english_threshold", self.english_threshold),
            ("lowercase_ratio", self.lowercase_ratio),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionReason {
    TooShort,
    TooLong,
    NotEnglish,
    UnbalancedDelimiters,
    NotLowercase,
    Malformed,
}

impl RejectionReason {
    pub const ALL: [RejectionReason; 6] = [
        RejectionReason::TooShort,
        RejectionReason::TooLong,
        RejectionReason::NotEnglish,
        RejectionReason::UnbalancedDelimiters,
        RejectionReason::NotLowercase,
        RejectionReason::Malformed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectionReason::TooShort => "too_short",
            RejectionReason::TooLong => "too_long",
            RejectionReason::NotEnglish => "not_english",
            RejectionReason::UnbalancedDelimiters => "unbalanced_delimiters",
            RejectionReason::NotLowercase => "not_lowercase",
            RejectionReason::Malformed => "malformed",
        }
    }
}

impl fmt::Display for RejectionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(` and `)` nest correctly and the number of `"` is even.
pub fn balanced_delimiters(sentence: &str) -> bool {
    let mut depth = 0i64;
    let mut quotes = 0usize;
    for c in sentence.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            '"' => quotes += 1,
            _ => {}
        }
    }
    depth == 0 && quotes.is_multiple_of(2)
}

/// Fraction of lowercase letters among alphabetic characters, ignoring the
/// first alphabetic character of the sentence, is at least `ratio`.
/// Sentences with nothing left to count fail.
pub fn mostly_lowercase(sentence: &str, ratio: f64) -> bool {
    let (mut lower, mut total) = (0usize, 0usize);
    for c in sentence.chars().filter(|c| c.is_alphabetic()).skip(1) {
        total += 1;
        if c.is_lowercase() {
            lower += 1;
        }
    }
    total > 0 && lower as f64 >= ratio * total as f64
}

/// Tokens fed to the language identifier.
pub fn langid_tokens(sentence: &str) -> Vec<String> {
    word_tokenize(sentence)
        .into_iter()
        .filter(|t| t.chars().any(char::is_alphabetic))
        .map(|t| t.to_lowercase())
        .collect()
}

/// Probability that `sentence` is English under a character n-gram model.
pub fn english_probability(sentence: &str, langid: &LinearModel) -> Result<f64> {
    let en = english_index(langid)?;
    Ok(english_probability_at(sentence, langid, en))
}

fn english_index(langid: &LinearModel) -> Result<usize> {
    langid.label_index(ENGLISH_LABEL).ok_or_else(|| {
        Error::Config(format!(
            "language model has no {ENGLISH_LABEL:?} label (labels: {:?})",
            langid.labels()
        ))
    })
}

fn english_probability_at(sentence: &str, langid: &LinearModel, en: usize) -> f64 {
    let ids = featurize(&langid_tokens(sentence), langid.feature_config());
    langid.probabilities(&ids)[en]
}

/// The full pair predicate, bound to a validated config and language model.
#[derive(Clone, Debug)]
pub struct PairFilter<'m> {
    config: FilterConfig,
    langid: &'m LinearModel,
    en: usize,
}

impl<'m> PairFilter<'m> {
    pub fn new(config: FilterConfig, langid: &'m LinearModel) -> Result<Self> {
        config.validate()?;
        if langid.feature_config().granularity != Granularity::Char {
            return Err(Error::Config("language model must use character n-grams".into()));
        }
        let en = english_index(langid)?;
        Ok(PairFilter { config, langid, en })
    }

    pub fn config(&self) -> &FilterConfig {
        &self.config
    }

    /// `Ok(())` when both sentences pass every check; otherwise the first
    /// failing check. Structural problems are reported before any content check.
    pub fn check(&self, pair: &SentencePair) -> Result<(), RejectionReason> {
        if !pair.is_well_formed() {
            return Err(RejectionReason::Malformed);
        }
        let sentences = [pair.s1.as_str(), pair.s2.as_str()];
        for s in sentences {
            let n = word_count(s);
            if n < self.config.min_words {
                return Err(RejectionReason::TooShort);
            }
            if n > self.config.max_words {
                return Err(RejectionReason::TooLong);
            }
        }
        for s in sentences {
            if english_probability_at(s, self.langid, self.en) <= self.config.english_threshold {
                return Err(RejectionReason::NotEnglish);
            }
        }
        if self.config.require_balanced && !sentences.iter().all(|s| balanced_delimiters(s)) {
            return Err(RejectionReason::UnbalancedDelimiters);
        }
        if !sentences
            .iter()
            .all(|s| mostly_lowercase(s, self.config.lowercase_ratio))
        {
            return Err(RejectionReason::NotLowercase);
        }
        Ok(())
    }
}

/// Stand-alone form of [`PairFilter::check`].
pub fn pair_passes(
    pair: &SentencePair,
    config: &FilterConfig,
    langid: &LinearModel,
) -> Result<Result<(), RejectionReason>> {
    Ok(PairFilter::new(config.clone(), langid)?.check(pair))
}

pub const LANGID_BUCKETS: u64 = 1 << 15;
pub const LANGID_DIM: usize = 16;
pub const LANGID_EPOCHS: u32 = 100;

pub fn langid_feature_config() -> FeatureConfig {
    FeatureConfig::chars(LANGID_BUCKETS, 1, 4)
}

pub fn langid_train_config(seed: u64) -> TrainConfig {
    TrainConfig {
        dim: LANGID_DIM,
        epochs: LANGID_EPOCHS,
        seed,
        ..Default::default()
    }
}

/// Reads `label TAB text` lines; blank lines and `#` comments are skipped.
pub fn parse_langid_tsv(text: &str, source: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| match l.split_once('\t') {
            Some((label, body)) if !label.is_empty() && !body.trim().is_empty() => {
                Ok((label.to_string(), body.to_string()))
            }
            _ => Err(Error::Format(format!("{source}:{}: expected `label TAB text`", n + 1))),
        })
        .collect()
}

/// Trains a language identifier on `(label, text)` samples, visited in an
/// order shuffled once under `config.seed`.
pub fn train_langid(
    samples: &[(String, String)],
    features: &FeatureConfig,
    config: &TrainConfig,
) -> Result<LinearModel> {
    features.validate()?;
    if features.granularity != Granularity::Char {
        return Err(Error::Config("language model must use character n-grams".into()));
    }
    if !samples.iter().any(|(l, _)| l == ENGLISH_LABEL) {
        return Err(Error::Training(format!("no {ENGLISH_LABEL:?} samples")));
    }
    let mut examples: Vec<Example> = samples
        .iter()
        .map(|(label, text)| Example::new(featurize(&langid_tokens(text), features), label.clone()))
        .collect();
    examples.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    train(&examples, features, config)
}

/// Accept/reject tallies; shard-level counters merge by addition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub total: u64,
    pub accepted: u64,
    pub rejected: BTreeMap<RejectionReason, u64>,
}

impl FilterStats {
    pub fn record(&mut self, verdict: Result<(), RejectionReason>) {
        self.total += 1;
        match verdict {
            Ok(()) => self.accepted += 1,
            Err(reason) => *self.rejected.entry(reason).or_default() += 1,
        }
    }

    pub fn merge(&mut self, other: &FilterStats) {
        self.total += other.total;
        self.accepted += other.accepted;
        for (&reason, &n) in &other.rejected {
            *self.rejected.entry(reason).or_default() += n;
        }
    }

    pub fn rejected_total(&self) -> u64 {
        self.rejected.values().sum()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.accepted as f64 / self.total as f64
        }
    }
}
