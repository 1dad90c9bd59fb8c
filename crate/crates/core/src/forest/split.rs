//! Labeled feature matrices and exhaustive single-feature threshold search.

use super::impurity::{split_score, ClassCounts, ImpurityKind};
use super::ForestError;

/// A dense labeled dataset: `n_samples x n_features` values plus one class
/// label per sample.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<f64>,
    n_samples: usize,
    n_features: usize,
    labels: Vec<usize>,
    n_classes: usize,
}

impl Dataset {
    /// Builds a dataset from per-sample feature rows. The class count is
    /// `max(labels) + 1`.
    pub fn from_rows(rows: &[Vec<f64>], labels: &[usize]) -> Result<Self, ForestError> {
        if rows.is_empty() {
            return Err(ForestError::EmptySampleSet);
        }
        if rows.len() != labels.len() {
            return Err(ForestError::BadParameter(format!(
                "{} feature rows vs {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let n_features = rows[0].len();
        if n_features == 0 {
            return Err(ForestError::BadParameter("feature rows are empty".into()));
        }
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(ForestError::BadParameter(format!(
                    "row {i} has {} features, expected {n_features}",
                    row.len()
                )));
            }
            features.extend_from_slice(row);
        }
        let n_classes = labels.iter().max().unwrap() + 1;
        Ok(Self {
            features,
            n_samples: rows.len(),
            n_features,
            labels: labels.to_vec(),
            n_classes,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    #[inline]
    pub fn value(&self, sample: usize, feature: usize) -> f64 {
        debug_assert!(sample < self.n_samples && feature < self.n_features);
        self.features[sample * self.n_features + feature]
    }

    #[inline]
    pub fn label(&self, sample: usize) -> usize {
        self.labels[sample]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Class counts over the selected samples.
    pub fn tally(&self, indices: &[usize]) -> ClassCounts {
        ClassCounts::tally(&self.labels, indices, self.n_classes)
    }
}

/// The winning (feature, threshold) pair of a node search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub score: f64,
}

/// Finds the best threshold split of `indices` over the candidate features.
///
/// Thresholds are midpoints between consecutive distinct sorted values of a
/// feature. Samples route left when `value < threshold`. Ties in score are
/// broken toward the lower feature index, then the lower threshold. Returns
/// `None` when fewer than two samples are given or no candidate scores
/// above zero (pure node, identical rows, zero-gain splits).
pub fn best_split(
    data: &Dataset,
    indices: &[usize],
    candidate_features: &[usize],
    kind: ImpurityKind,
) -> Option<SplitCandidate> {
    if indices.len() < 2 {
        return None;
    }
    let parent = data.tally(indices);
    if parent.is_pure() {
        return None;
    }

    let mut best: Option<SplitCandidate> = None;
    let mut column: Vec<(f64, usize)> = Vec::with_capacity(indices.len());
    for &feature in candidate_features {
        column.clear();
        column.extend(indices.iter().map(|&i| (data.value(i, feature), data.label(i))));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = ClassCounts::new(data.n_classes());
        let mut right = parent.clone();
        for w in 0..column.len() - 1 {
            let (value, label) = column[w];
            left.increment(label);
            right.decrement(label);
            let next = column[w + 1].0;
            if value == next {
                continue; // not a boundary between distinct values
            }
            let threshold = 0.5 * (value + next);
            let score = split_score(kind, &parent, &left, &right)
                .expect("internal counts always partition the parent");
            let candidate = SplitCandidate { feature, threshold, score };
            let wins = match best {
                None => true,
                Some(b) => {
                    score > b.score
                        || (score == b.score
                            && (feature < b.feature
                                || (feature == b.feature && threshold < b.threshold)))
                }
            };
            if wins {
                best = Some(candidate);
            }
        }
    }
    best.filter(|b| b.score > 0.0)
}
