use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::extraction::{Instance, MarkerLexicon};
use crate::linclass::fnv1a;

pub const DEFAULT_CAP: u64 = 200_000;
pub const DEFAULT_MIN_COUNT: u64 = 10_000;

/// Seed of an independent random stream named `tag` under `seed`.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    let mut bytes = seed.to_le_bytes().to_vec();
    bytes.extend_from_slice(tag.as_bytes());
    fnv1a(&bytes)
}

pub(crate) fn marker_rng(seed: u64, purpose: &str, marker: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("{purpose}/{marker}")))
}

struct Reservoir {
    seen: u64,
    kept: Vec<(u64, Instance)>,
    rng: ChaCha8Rng,
}

/// Single-pass per-marker reservoir sampling.
///
/// Each marker draws from its own seeded stream, so the kept set of a marker
/// does not depend on how other markers interleave with it. Output keeps the
/// original stream order.
pub struct CapSampler {
    cap: usize,
    seed: u64,
    position: u64,
    reservoirs: HashMap<String, Reservoir>,
}

impl CapSampler {
    pub fn new(cap: u64, seed: u64) -> Result<Self> {
        if cap < 1 {
            return Err(Error::Argument("cap must be at least 1".into()));
        }
        Ok(CapSampler {
            cap: cap as usize,
            seed,
            position: 0,
            reservoirs: HashMap::new(),
        })
    }

    pub fn push(&mut self, instance: Instance) {
        let position = self.position;
        self.position += 1;
        let seed = self.seed;
        let r = self
            .reservoirs
            .entry(instance.marker.clone())
            .or_insert_with(|| Reservoir {
                seen: 0,
                kept: Vec::new(),
                rng: marker_rng(seed, "cap", &instance.marker),
            });
        r.seen += 1;
        if r.kept.len() < self.cap {
            r.kept.push((position, instance));
        } else {
            let j = r.rng.random_range(0..r.seen) as usize;
            if j < self.cap {
                r.kept[j] = (position, instance);
            }
        }
    }

    /// Instances seen per marker so far.
    pub fn seen(&self) -> BTreeMap<String, u64> {
        self.reservoirs.iter().map(|(m, r)| (m.clone(), r.seen)).collect()
    }

    pub fn finish(self) -> Vec<Instance> {
        let mut all: Vec<(u64, Instance)> = self.reservoirs.into_values().flat_map(|r| r.kept).collect();
        all.sort_by_key(|(p, _)| *p);
        all.into_iter().map(|(_, i)| i).collect()
    }
}

/// Keeps at most `cap` uniformly chosen instances per marker.
pub fn cap_subsample<I: IntoIterator<Item = Instance>>(instances: I, cap: u64, seed: u64) -> Result<Vec<Instance>> {
    let mut sampler = CapSampler::new(cap, seed)?;
    for i in instances {
        sampler.push(i);
    }
    Ok(sampler.finish())
}

/// Drops instances whose marker has fewer than `min_count` occurrences in the
/// lexicon (markers absent from the lexicon count as zero).
pub fn apply_min_count(instances: Vec<Instance>, lexicon: &MarkerLexicon, min_count: u64) -> Vec<Instance> {
    let keep: HashMap<&str, bool> = lexicon
        .entries
        .iter()
        .map(|e| (e.form.as_str(), e.count >= min_count))
        .collect();
    instances
        .into_iter()
        .filter(|i| keep.get(i.marker.as_str()).copied().unwrap_or(false))
        .collect()
}

/// Positions of each marker's instances, keyed by marker.
pub(crate) fn group_by_marker(instances: &[Instance]) -> BTreeMap<&str, Vec<usize>> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, inst) in instances.iter().enumerate() {
        groups.entry(inst.marker.as_str()).or_default().push(i);
    }
    groups
}

/// Per-marker uniform sample of `quota(marker)` instances, in input order.
/// Markers with too few instances are returned as `(marker, available)`.
pub(crate) fn balanced_sample(
    instances: &[Instance],
    seed: u64,
    quota: impl Fn(&str) -> usize,
) -> (Vec<Instance>, Vec<(String, usize)>) {
    let mut chosen = Vec::new();
    let mut short = Vec::new();
    for (marker, positions) in group_by_marker(instances) {
        let want = quota(marker);
        if positions.len() < want {
            short.push((marker.to_string(), positions.len()));
        }
        let take = want.min(positions.len());
        let mut rng = marker_rng(seed, "sample", marker);
        let mut picked = rand::seq::index::sample(&mut rng, positions.len(), take).into_vec();
        picked.sort_unstable();
        chosen.extend(picked.into_iter().map(|k| positions[k]));
    }
    chosen.sort_unstable();
    (chosen.into_iter().map(|i| instances[i].clone()).collect(), short)
}
