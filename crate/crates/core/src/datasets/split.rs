use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::sampling::{group_by_marker, marker_rng};
use crate::error::{Error, Result};
use crate::extraction::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportions {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Default for Proportions {
    fn default() -> Self {
        Proportions {
            train: 0.9,
            valid: 0.05,
            test: 0.05,
        }
    }
}

impl Proportions {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.valid, self.test];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
            return Err(Error::Argument(format!(
                "split proportions {}/{}/{} must be in [0,1] and sum to 1",
                self.train, self.valid, self.test
            )));
        }
        Ok(())
    }

    /// `(train, valid, test)` sizes for `n` items: train takes the floor of its
    /// share, valid its rounded share of what is left, test the remainder.
    pub fn allocate(&self, n: usize) -> (usize, usize, usize) {
        let train = ((n as f64 * self.train) + 1e-9).floor() as usize;
        let train = train.min(n);
        let valid = ((n as f64 * self.valid).round() as usize).min(n - train);
        (train, valid, n - train - valid)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<Instance>,
    pub valid: Vec<Instance>,
    pub test: Vec<Instance>,
}

impl DatasetSplit {
    pub fn parts(&self) -> [(&'static str, &[Instance]); 3] {
        [("train", &self.train), ("valid", &self.valid), ("test", &self.test)]
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.valid.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Stratified split: each marker's instances are shuffled under the seed and
/// cut by [`Proportions::allocate`]. Every part keeps the input order.
pub fn split_dataset(dataset: &[Instance], proportions: &Proportions, seed: u64) -> Result<DatasetSplit> {
    proportions.validate()?;
    let mut part_of = vec![0u8; dataset.len()];
    for (marker, mut positions) in group_by_marker(dataset) {
        positions.shuffle(&mut marker_rng(seed, "split", marker));
        let (train, valid, _) = proportions.allocate(positions.len());
        for (rank, &p) in positions.iter().enumerate() {
            part_of[p] = if rank < train {
                0
            } else if rank < train + valid {
                1
            } else {
                2
            };
        }
    }
    let mut split = DatasetSplit::default();
    for (inst, part) in dataset.iter().zip(part_of) {
        match part {
            0 => split.train.push(inst.clone()),
            1 => split.valid.push(inst.clone()),
            _ => split.test.push(inst.clone()),
        }
    }
    Ok(split)
}

/// Permutes second sentences among instances sharing a marker, within this
/// part only. First sentences and markers stay in place.
pub fn shuffle_within_labels(part: &[Instance], seed: u64) -> Vec<Instance> {
    let mut out = part.to_vec();
    for (marker, positions) in group_by_marker(part) {
        let mut sentences: Vec<&str> = positions.iter().map(|&p| part[p].s2_prime.as_str()).collect();
        sentences.shuffle(&mut marker_rng(seed, "shuffle", marker));
        for (&p, s) in positions.iter().zip(sentences) {
            out[p].s2_prime = s.to_string();
        }
    }
    out
}
