//! Averaged-perceptron part-of-speech tagger.
//!
//! Greedy left-to-right decoding over a fixed feature template:
//!
//! | feature | value |
//! |---|---|
//! | `bias` | always present |
//! | `w` / `lw` | word, lowercased word |
//! | `s1` `s2` `s3` | lowercased suffixes of length 1 to 3 |
//! | `p1` | first character |
//! | `t-1` / `t-2,t-1` | previous tag, previous two tags |
//! | `lw-1` / `lw+1` | neighbouring lowercased words |
//! | `digit` `hyphen` `upper` | shape indicators |
//!
//! Words seen at least [`DEFAULT_DICT_MIN_COUNT`] times with one tag in at
//! least [`DEFAULT_DICT_PURITY`] of cases bypass the model entirely.

mod perceptron;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use perceptron::argmax;
pub use perceptron::AveragedPerceptron;

use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};

pub const TAGGER_MAGIC: &[u8; 4] = b"DMPT";
pub const TAGGER_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_TAGGER_EPOCHS: u32 = 5;
pub const DEFAULT_DICT_MIN_COUNT: u32 = 20;
pub const DEFAULT_DICT_PURITY: f32 = 0.97;

const START: &str = "-START-";
const START2: &str = "-START2-";
const END: &str = "-END-";

/// Adverb and coordinating-conjunction tags admitted by the candidate rule.
pub const CANDIDATE_TAGS: [&str; 4] = ["RB", "RBR", "RBS", "CC"];

pub fn is_candidate_pos(tag: &str) -> bool {
    CANDIDATE_TAGS.contains(&tag)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<String>, tags: Vec<String>) -> Result<Self> {
        if tokens.len() != tags.len() {
            return Err(Error::Argument(format!(
                "{} tokens but {} tags",
                tokens.len(),
                tags.len()
            )));
        }
        Ok(TaggedSentence { tokens, tags })
    }

    /// Parses `word_TAG word_TAG ...`; the tag follows the last underscore.
    pub fn parse(line: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut tags = Vec::new();
        for item in line.split_whitespace() {
            match item.rsplit_once('_') {
                Some((word, tag)) if !word.is_empty() && !tag.is_empty() => {
                    tokens.push(word.to_string());
                    tags.push(tag.to_string());
                }
                _ => return Err(Error::Format(format!("token {item:?} is not word_TAG"))),
            }
        }
        Ok(TaggedSentence { tokens, tags })
    }

    pub fn to_line(&self) -> String {
        self.tokens
            .iter()
            .zip(&self.tags)
            .map(|(w, t)| format!("{w}_{t}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Reads a tagged corpus, one sentence per line; blank lines are skipped.
pub fn read_tagged_corpus(text: &str) -> Result<Vec<TaggedSentence>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| TaggedSentence::parse(l).map_err(|e| Error::Format(format!("line {}: {e}", i + 1))))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggerTrainConfig {
    pub epochs: u32,
    pub seed: u64,
    pub dict_min_count: u32,
    pub dict_purity: f32,
}

impl Default for TaggerTrainConfig {
    fn default() -> Self {
        TaggerTrainConfig {
            epochs: DEFAULT_TAGGER_EPOCHS,
            seed: 0,
            dict_min_count: DEFAULT_DICT_MIN_COUNT,
            dict_purity: DEFAULT_DICT_PURITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggerMetadata {
    pub epochs: u32,
    pub seed: u64,
    pub dict_min_count: u32,
    pub dict_purity: f32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggerModel {
    tags: Vec<String>,
    weights: HashMap<String, Vec<(u16, f32)>>,
    tag_dictionary: HashMap<String, u16>,
    metadata: TaggerMetadata,
}

fn suffix(word: &str, n: usize) -> &str {
    match word.char_indices().rev().nth(n - 1) {
        Some((i, _)) => &word[i..],
        None => word,
    }
}

/// Feature strings for the token at `i`, given the two previous predicted tags.
pub fn token_features<S: AsRef<str>>(tokens: &[S], i: usize, prev: &str, prev2: &str) -> Vec<String> {
    let word = tokens[i].as_ref();
    let lower = word.to_lowercase();
    let neighbour = |j: Option<usize>, edge: &str| {
        j.and_then(|j| tokens.get(j))
            .map_or_else(|| edge.to_string(), |t| t.as_ref().to_lowercase())
    };
    let mut f = Vec::with_capacity(16);
    f.push("bias".to_string());
    f.push(format!("w {word}"));
    f.push(format!("lw {lower}"));
    for n in 1..=3 {
        f.push(format!("s{n} {}", suffix(&lower, n)));
    }
    if let Some(c) = word.chars().next() {
        f.push(format!("p1 {c}"));
    }
    f.push(format!("t-1 {prev}"));
    f.push(format!("t-2,t-1 {prev2} {prev}"));
    f.push(format!("lw-1 {}", neighbour(i.checked_sub(1), START)));
    f.push(format!("lw+1 {}", neighbour(Some(i + 1), END)));
    if word.chars().any(|c| c.is_ascii_digit()) {
        f.push("digit".to_string());
    }
    if word.contains('-') {
        f.push("hyphen".to_string());
    }
    if word.chars().next().is_some_and(char::is_uppercase) {
        f.push("upper".to_string());
    }
    f
}

/// Sentence visiting order for one training epoch.
pub fn epoch_order(seed: u64, epoch: u32, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(epoch) << 32 | 0x7a67));
    order.shuffle(&mut rng);
    order
}

fn build_dictionary(
    corpus: &[TaggedSentence],
    tag_index: &HashMap<&str, u16>,
    min_count: u32,
    purity: f32,
) -> HashMap<String, u16> {
    let mut counts: HashMap<&str, BTreeMap<&str, u32>> = HashMap::new();
    for s in corpus {
        for (w, t) in s.tokens.iter().zip(&s.tags) {
            *counts.entry(w).or_default().entry(t).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter_map(|(word, tags)| {
            let total: u32 = tags.values().sum();
            let (&tag, &best) = tags.iter().max_by_key(|(_, &n)| n)?;
            (total >= min_count && best as f64 >= f64::from(purity) * total as f64)
                .then(|| (word.to_string(), tag_index[tag]))
        })
        .collect()
}

/// Trains a tagger with per-epoch seeded sentence shuffling.
pub fn train_tagger(corpus: &[TaggedSentence], config: &TaggerTrainConfig) -> Result<TaggerModel> {
    if corpus.iter().all(|s| s.tokens.is_empty()) {
        return Err(Error::Training("tagged corpus is empty".into()));
    }
    if config.epochs == 0 {
        return Err(Error::Argument("tagger epochs must be at least 1".into()));
    }
    if let Some(bad) = corpus.iter().find(|s| s.tokens.len() != s.tags.len()) {
        return Err(Error::Training(format!(
            "sentence {:?} has mismatched tags",
            bad.tokens
        )));
    }
    let tags: Vec<String> = corpus
        .iter()
        .flat_map(|s| s.tags.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if tags.len() > usize::from(u16::MAX) {
        return Err(Error::Training("tagset too large".into()));
    }
    let tag_index: HashMap<&str, u16> = tags.iter().enumerate().map(|(i, t)| (t.as_str(), i as u16)).collect();
    let tag_dictionary = build_dictionary(corpus, &tag_index, config.dict_min_count, config.dict_purity);

    let mut model = AveragedPerceptron::new(tags.len());
    for epoch in 0..config.epochs {
        for s in epoch_order(config.seed, epoch, corpus.len()) {
            let sentence = &corpus[s];
            let (mut prev, mut prev2) = (START.to_string(), START2.to_string());
            for (i, truth) in sentence.tags.iter().enumerate() {
                let guess = match tag_dictionary.get(&sentence.tokens[i]) {
                    Some(&t) => t,
                    None => {
                        let feats = token_features(&sentence.tokens, i, &prev, &prev2);
                        let guess = model.predict(&feats);
                        model.update(tag_index[truth.as_str()], guess, &feats);
                        model.tick();
                        guess
                    }
                };
                prev2 = std::mem::replace(&mut prev, tags[guess as usize].clone());
            }
        }
    }

    let weights = model
        .averaged()
        .into_iter()
        .map(|(f, row)| (f, row.into_iter().map(|(c, w)| (c, w as f32)).collect()))
        .collect();
    Ok(TaggerModel {
        tags,
        weights,
        tag_dictionary,
        metadata: TaggerMetadata {
            epochs: config.epochs,
            seed: config.seed,
            dict_min_count: config.dict_min_count,
            dict_purity: config.dict_purity,
        },
    })
}

impl TaggerModel {
    pub fn tagset(&self) -> &[String] {
        &self.tags
    }

    pub fn metadata(&self) -> &TaggerMetadata {
        &self.metadata
    }

    pub fn dictionary_tag(&self, word: &str) -> Option<&str> {
        self.tag_dictionary.get(word).map(|&t| self.tags[t as usize].as_str())
    }

    /// Deployed (averaged) weight of a feature for a tag.
    pub fn weight(&self, feature: &str, tag: &str) -> f32 {
        let Some(t) = self.tags.iter().position(|x| x == tag) else {
            return 0.0;
        };
        self.weights
            .get(feature)
            .and_then(|row| row.iter().find(|(c, _)| usize::from(*c) == t))
            .map_or(0.0, |&(_, w)| w)
    }

    fn predict(&self, feats: &[String]) -> u16 {
        let mut scores = vec![0.0f64; self.tags.len()];
        for f in feats {
            if let Some(row) = self.weights.get(f) {
                for &(c, w) in row {
                    scores[c as usize] += f64::from(w);
                }
            }
        }
        argmax(&scores)
    }

    fn tag_indices<S: AsRef<str>>(&self, tokens: &[S], limit: usize) -> Vec<u16> {
        let mut out = Vec::with_capacity(limit.min(tokens.len()));
        let (mut prev, mut prev2) = (START, START2);
        for i in 0..limit.min(tokens.len()) {
            let t = match self.tag_dictionary.get(tokens[i].as_ref()) {
                Some(&t) => t,
                None => self.predict(&token_features(tokens, i, prev, prev2)),
            };
            out.push(t);
            prev2 = prev;
            prev = &self.tags[t as usize];
        }
        out
    }

    pub fn tag<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<String> {
        self.tag_indices(tokens, tokens.len())
            .into_iter()
            .map(|t| self.tags[t as usize].clone())
            .collect()
    }

    /// Tag of the first token in context. Decoding is greedy, so this equals
    /// `tag(tokens)[0]` without tagging the rest of the sentence.
    pub fn tag_first<S: AsRef<str>>(&self, tokens: &[S]) -> Option<&str> {
        self.tag_indices(tokens, 1)
            .first()
            .map(|&t| self.tags[t as usize].as_str())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = Writer::new(w);
        out.bytes(TAGGER_MAGIC)?;
        out.u32(TAGGER_FORMAT_VERSION)?;
        out.u32(self.metadata.epochs)?;
        out.u64(self.metadata.seed)?;
        out.u32(self.metadata.dict_min_count)?;
        out.f32(self.metadata.dict_purity)?;
        out.u32(self.tags.len() as u32)?;
        for t in &self.tags {
            out.string(t)?;
        }
        let dict: BTreeMap<&String, &u16> = self.tag_dictionary.iter().collect();
        out.u32(dict.len() as u32)?;
        for (word, &tag) in dict {
            out.string(word)?;
            out.u32(u32::from(tag))?;
        }
        let features: BTreeMap<&String, &Vec<(u16, f32)>> = self.weights.iter().collect();
        let records: u64 = features.values().map(|r| r.len() as u64).sum();
        out.u64(records)?;
        for (feature, row) in features {
            for &(c, w) in row {
                out.string(feature)?;
                out.string(&self.tags[c as usize])?;
                out.f32(w)?;
            }
        }
        out.finish()
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut input = Reader::new(r);
        if &input.array::<4>()? != TAGGER_MAGIC {
            return Err(Error::Format("not a tagger model file (bad magic)".into()));
        }
        let version = input.u32()?;
        if version != TAGGER_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported tagger version {version}")));
        }
        let metadata = TaggerMetadata {
            epochs: input.u32()?,
            seed: input.u64()?,
            dict_min_count: input.u32()?,
            dict_purity: input.f32()?,
        };
        let n_tags = input.u32()? as usize;
        let tags = (0..n_tags).map(|_| input.string()).collect::<Result<Vec<_>>>()?;
        let index: HashMap<&str, u16> = tags.iter().enumerate().map(|(i, t)| (t.as_str(), i as u16)).collect();
        let n_dict = input.u32()?;
        let mut tag_dictionary = HashMap::new();
        for _ in 0..n_dict {
            let word = input.string()?;
            let tag = input.u32()?;
            if tag as usize >= n_tags {
                return Err(Error::Format(format!("dictionary tag {tag} out of range")));
            }
            tag_dictionary.insert(word, tag as u16);
        }
        let records = input.u64()?;
        let mut weights: HashMap<String, Vec<(u16, f32)>> = HashMap::new();
        for _ in 0..records {
            let feature = input.string()?;
            let tag = input.string()?;
            let w = input.f32()?;
            let &c = index
                .get(tag.as_str())
                .ok_or_else(|| Error::Format(format!("weight for unknown tag {tag:?}")))?;
            if !w.is_finite() {
                return Err(Error::Format("non-finite tagger weight".into()));
            }
            weights.entry(feature).or_default().push((c, w));
        }
        input.expect_eof()?;
        Ok(TaggerModel {
            tags,
            weights,
            tag_dictionary,
            metadata,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

/// Token accuracy of `model` on a tagged corpus.
pub fn token_accuracy(model: &TaggerModel, corpus: &[TaggedSentence]) -> f64 {
    let (mut right, mut total) = (0usize, 0usize);
    for s in corpus {
        for (got, want) in model.tag(&s.tokens).iter().zip(&s.tags) {
            total += 1;
            right += usize::from(got == want);
        }
    }
    if total == 0 {
        0.0
    } else {
        right as f64 / total as f64
    }
}
