//! Synthetic instances with marker-specific cue words, for checking what a
//! shallow classifier can exploit.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::Instance;
use crate::linclass::{FeatureConfig, KFoldConfig, TrainConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CueCorpusConfig {
    pub markers: Vec<String>,
    pub instances: usize,
    /// Distinct cue words per marker and side.
    pub cues_per_marker: usize,
    /// Probability that s1 carries one of its marker's cues.
    pub s1_cue_rate: f64,
    /// Probability that s2' carries one of its marker's cues, drawn
    /// independently of s1.
    pub s2_cue_rate: f64,
    pub filler_vocab: usize,
    pub sentence_len: usize,
    pub seed: u64,
}

impl Default for CueCorpusConfig {
    fn default() -> Self {
        CueCorpusConfig {
            markers: [
                "however",
                "so",
                "then",
                "still",
                "finally",
                "instead",
                "meanwhile",
                "indeed",
                "thus",
                "yet",
            ]
            .map(String::from)
            .to_vec(),
            instances: 5000,
            cues_per_marker: 3,
            s1_cue_rate: 0.5,
            s2_cue_rate: 0.5,
            filler_vocab: 300,
            sentence_len: 8,
            seed: 0,
        }
    }
}

fn sentence(rng: &mut ChaCha8Rng, config: &CueCorpusConfig, cue: Option<String>) -> Vec<String> {
    let mut words: Vec<String> = (0..config.sentence_len)
        .map(|_| format!("w{}", rng.random_range(0..config.filler_vocab)))
        .collect();
    if let Some(cue) = cue {
        let at = rng.random_range(0..words.len());
        words[at] = cue;
    }
    words
}

fn capitalized(mut words: Vec<String>, end: &str) -> String {
    if let Some(first) = words.first_mut() {
        let mut chars = first.chars();
        if let Some(c) = chars.next() {
            *first = c.to_uppercase().chain(chars).collect();
        }
    }
    words.join(" ") + end
}

/// Instances whose marker is uniform over `config.markers`. Each side
/// independently carries a cue word of the form `<side><marker index>x<k>`.
pub fn cue_corpus(config: &CueCorpusConfig) -> Result<Vec<Instance>> {
    if config.markers.is_empty() || config.sentence_len == 0 || config.filler_vocab == 0 || config.cues_per_marker == 0
    {
        return Err(Error::Argument("cue corpus needs markers, words and cues".into()));
    }
    for rate in [config.s1_cue_rate, config.s2_cue_rate] {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::Argument(format!("cue rate {rate} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let indices: Vec<usize> = (0..config.markers.len()).collect();
    let mut out = Vec::with_capacity(config.instances);
    for _ in 0..config.instances {
        let m = *indices.choose(&mut rng).expect("markers is non-empty");
        let cue = |side: &str, rate: f64, rng: &mut ChaCha8Rng| {
            rng.random_bool(rate)
                .then(|| format!("{side}{m}x{}", rng.random_range(0..config.cues_per_marker)))
        };
        let c1 = cue("a", config.s1_cue_rate, &mut rng);
        let c2 = cue("b", config.s2_cue_rate, &mut rng);
        let s1 = sentence(&mut rng, config, c1);
        let s2 = sentence(&mut rng, config, c2);
        out.push(Instance {
            s1: capitalized(s1, "."),
            s2_prime: capitalized(s2, "."),
            marker: config.markers[m].clone(),
        });
    }
    Ok(out)
}

/// Instances where `cued_marker` always follows an s1 containing `cue_word`,
/// while the other markers follow cue-free filler. Second sentences carry no
/// signal at all.
pub fn s1_trigger_corpus(
    cued_marker: &str,
    cue_word: &str,
    others: &[&str],
    per_marker: usize,
    seed: u64,
) -> Vec<Instance> {
    let config = CueCorpusConfig {
        filler_vocab: 100,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..per_marker {
        for (marker, cue) in
            std::iter::once((cued_marker, Some(cue_word.to_string()))).chain(others.iter().map(|m| (*m, None)))
        {
            let s1 = sentence(&mut rng, &config, cue);
            let s2 = sentence(&mut rng, &config, None);
            out.push(Instance {
                s1: capitalized(s1, "."),
                s2_prime: capitalized(s2, "."),
                marker: marker.to_string(),
            });
        }
    }
    out
}

/// Cross-validation settings for cue corpora: a 2^16-bucket table keeps the
/// five fold models small, and ten epochs let rare cue words converge.
pub fn cue_kfold_config(seed: u64) -> KFoldConfig {
    KFoldConfig {
        seed,
        features: FeatureConfig::words(1 << 16, 2).with_side_prefixing(true),
        train: TrainConfig {
            epochs: 10,
            seed,
            ..Default::default()
        },
        ..Default::default()
    }
}
