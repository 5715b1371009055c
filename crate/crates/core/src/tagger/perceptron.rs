use std::collections::HashMap;

/// Weight of one (feature, class) cell with its lazily accumulated total.
#[derive(Clone, Copy, Debug, Default)]
struct Cell {
    weight: f64,
    total: f64,
    stamp: u64,
}

/// Multiclass perceptron whose final weights are the average of the weight
/// vector after every example.
///
/// Totals are accumulated lazily: a cell only settles its running sum when it
/// is touched, so one update costs O(features) regardless of model size.
#[derive(Clone, Debug, Default)]
pub struct AveragedPerceptron {
    n_classes: usize,
    cells: HashMap<String, HashMap<u16, Cell>>,
    ticks: u64,
}

impl AveragedPerceptron {
    pub fn new(n_classes: usize) -> Self {
        AveragedPerceptron {
            n_classes,
            ..Default::default()
        }
    }

    /// Examples seen so far.
    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    pub fn scores<S: AsRef<str>>(&self, features: &[S]) -> Vec<f64> {
        let mut scores = vec![0.0; self.n_classes];
        for f in features {
            if let Some(classes) = self.cells.get(f.as_ref()) {
                for (&c, cell) in classes {
                    scores[c as usize] += cell.weight;
                }
            }
        }
        scores
    }

    /// Highest-scoring class under the current weights; ties go to the lower index.
    pub fn predict<S: AsRef<str>>(&self, features: &[S]) -> u16 {
        argmax(&self.scores(features))
    }

    /// Standard perceptron correction: +1 on the truth, -1 on the guess.
    /// A no-op when they agree.
    pub fn update<S: AsRef<str>>(&mut self, truth: u16, guess: u16, features: &[S]) {
        if truth == guess {
            return;
        }
        for f in features {
            let classes = self.cells.entry(f.as_ref().to_string()).or_default();
            for (class, delta) in [(truth, 1.0), (guess, -1.0)] {
                let cell = classes.entry(class).or_default();
                cell.total += (self.ticks - cell.stamp) as f64 * cell.weight;
                cell.stamp = self.ticks;
                cell.weight += delta;
            }
        }
    }

    /// Closes the current example.
    pub fn tick(&mut self) {
        self.ticks += 1;
    }

    /// Current (unaveraged) weight of a cell.
    pub fn weight(&self, feature: &str, class: u16) -> f64 {
        self.cells
            .get(feature)
            .and_then(|c| c.get(&class))
            .map_or(0.0, |c| c.weight)
    }

    /// Average of the weight vectors after each of the `ticks` examples,
    /// with zero cells dropped.
    pub fn averaged(&self) -> HashMap<String, Vec<(u16, f64)>> {
        let mut out = HashMap::new();
        if self.ticks == 0 {
            return out;
        }
        for (feature, classes) in &self.cells {
            let mut row: Vec<(u16, f64)> = classes
                .iter()
                .map(|(&c, cell)| {
                    let total = cell.total + (self.ticks - cell.stamp) as f64 * cell.weight;
                    (c, total / self.ticks as f64)
                })
                .filter(|&(_, w)| w != 0.0)
                .collect();
            if !row.is_empty() {
                row.sort_by_key(|&(c, _)| c);
                out.insert(feature.clone(), row);
            }
        }
        out
    }
}

pub(crate) fn argmax(scores: &[f64]) -> u16 {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best as u16
}
