//! Hashed bag-of-n-grams featurization.
//!
//! Every n-gram is reduced to a bucket id with 64-bit FNV-1a over its UTF-8
//! bytes, taken modulo `bucket_count`. Word n-grams hash the tokens joined by
//! a single space. Character n-grams are taken over each token wrapped in the
//! `<` and `>` boundary sentinels. With side prefixing enabled, the bytes
//! `s1\x1f` or `s2\x1f` are hashed ahead of the n-gram. The hash and the
//! byte layout are part of the model file contract and must not change.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BUCKET_COUNT: u64 = 1 << 21;
pub const DEFAULT_NGRAM_MAX: u32 = 3;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

const SIDE_SEPARATOR: u8 = 0x1f;
const BOW: char = '<';
const EOW: char = '>';

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Word,
    Char,
}

/// Which sentence of a pair a token came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    First,
    Second,
}

impl Side {
    fn tag(self) -> &'static [u8] {
        match self {
            Side::First => b"s1",
            Side::Second => b"s2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub bucket_count: u64,
    pub ngram_max: u32,
    pub granularity: Granularity,
    /// Inclusive character n-gram length range, used in char mode only.
    pub char_ngram_min: u32,
    pub char_ngram_max: u32,
    pub side_prefixing: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            bucket_count: DEFAULT_BUCKET_COUNT,
            ngram_max: DEFAULT_NGRAM_MAX,
            granularity: Granularity::Word,
            char_ngram_min: 1,
            char_ngram_max: 4,
            side_prefixing: false,
        }
    }
}

impl FeatureConfig {
    /// Word n-grams with the given bucket count.
    pub fn words(bucket_count: u64, ngram_max: u32) -> Self {
        FeatureConfig {
            bucket_count,
            ngram_max,
            ..Default::default()
        }
    }

    /// Character n-grams, as used for language identification.
    pub fn chars(bucket_count: u64, min: u32, max: u32) -> Self {
        FeatureConfig {
            bucket_count,
            granularity: Granularity::Char,
            char_ngram_min: min,
            char_ngram_max: max,
            ..Default::default()
        }
    }

    pub fn with_side_prefixing(mut self, enabled: bool) -> Self {
        self.side_prefixing = enabled;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.bucket_count < 2 || self.bucket_count > u64::from(u32::MAX) + 1 {
            return Err(Error::Config(format!(
                "bucket_count must lie in [2, 2^32], got {}",
                self.bucket_count
            )));
        }
        if self.ngram_max < 1 {
            return Err(Error::Config("ngram_max must be at least 1".into()));
        }
        if self.char_ngram_min < 1 || self.char_ngram_min > self.char_ngram_max {
            return Err(Error::Config(format!(
                "char n-gram range {}..={} is empty or starts below 1",
                self.char_ngram_min, self.char_ngram_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(FNV_OFFSET)
    }

    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }
}

/// 64-bit FNV-1a of `bytes`.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = Fnv1a::new();
    h.write(bytes);
    h.0
}

fn seeded_hasher(side: Option<Side>) -> Fnv1a {
    let mut h = Fnv1a::new();
    if let Some(side) = side {
        h.write(side.tag());
        h.write(&[SIDE_SEPARATOR]);
    }
    h
}

/// Features of an unprefixed token sequence.
pub fn featurize<S: AsRef<str>>(tokens: &[S], config: &FeatureConfig) -> Vec<u32> {
    let mut out = Vec::new();
    featurize_into(tokens, config, None, &mut out);
    out
}

/// Appends the features of `tokens` to `out`. `side` is hashed in front of
/// every n-gram only when the config enables side prefixing.
pub fn featurize_into<S: AsRef<str>>(tokens: &[S], config: &FeatureConfig, side: Option<Side>, out: &mut Vec<u32>) {
    let side = if config.side_prefixing { side } else { None };
    let base = seeded_hasher(side);
    let buckets = config.bucket_count;
    match config.granularity {
        Granularity::Word => {
            let max = config.ngram_max as usize;
            for start in 0..tokens.len() {
                let mut h = base;
                for (offset, token) in tokens[start..].iter().take(max).enumerate() {
                    if offset > 0 {
                        h.write(b" ");
                    }
                    h.write(token.as_ref().as_bytes());
                    out.push((h.0 % buckets) as u32);
                }
            }
        }
        Granularity::Char => {
            let (lo, hi) = (config.char_ngram_min as usize, config.char_ngram_max as usize);
            let mut chars: Vec<char> = Vec::new();
            let mut buf = [0u8; 4];
            for token in tokens {
                chars.clear();
                chars.push(BOW);
                chars.extend(token.as_ref().chars());
                chars.push(EOW);
                for start in 0..chars.len() {
                    let mut h = base;
                    for (offset, c) in chars[start..].iter().take(hi).enumerate() {
                        h.write(c.encode_utf8(&mut buf).as_bytes());
                        if offset + 1 >= lo {
                            out.push((h.0 % buckets) as u32);
                        }
                    }
                }
            }
        }
    }
}

/// Features of a sentence pair: the first sentence under side tag `s1`
/// followed by the second under `s2`, so a word shared by both sentences
/// lands in different buckets.
pub fn pair_featurize<S: AsRef<str>, T: AsRef<str>>(
    s1_tokens: &[S],
    s2p_tokens: &[T],
    config: &FeatureConfig,
) -> Result<Vec<u32>> {
    if !config.side_prefixing {
        return Err(Error::Config("pair featurization requires side_prefixing".into()));
    }
    let mut out = Vec::new();
    featurize_into(s1_tokens, config, Some(Side::First), &mut out);
    featurize_into(s2p_tokens, config, Some(Side::Second), &mut out);
    Ok(out)
}
