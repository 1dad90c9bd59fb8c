//! Person-disjoint dataset partitioning.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::manifest::ManifestEntry;
use super::PipelineError;

/// Target image-count fractions for the three partitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    train: f64,
    validation: f64,
    test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.8, validation: 0.1, test: 0.1 }
    }
}

impl SplitRatios {
    /// Builds ratios, requiring each in `[0, 1]` and a sum of 1.
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self, PipelineError> {
        for (name, v) in [("train", train), ("validation", validation), ("test", test)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(PipelineError::BadParameter(format!(
                    "{name} ratio must lie in [0, 1], got {v}"
                )));
            }
        }
        let sum = train + validation + test;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(PipelineError::BadParameter(format!(
                "ratios must sum to 1, got {sum}"
            )));
        }
        Ok(Self { train, validation, test })
    }

    pub fn train(&self) -> f64 {
        self.train
    }

    pub fn validation(&self) -> f64 {
        self.validation
    }

    pub fn test(&self) -> f64 {
        self.test
    }
}

/// A three-way partition of manifest entries in which every subject's
/// images live in exactly one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<ManifestEntry>,
    pub validation: Vec<ManifestEntry>,
    pub test: Vec<ManifestEntry>,
    pub seed: u64,
}

/// Splits entries into train/validation/test without separating any
/// subject's images.
///
/// Distinct subjects (in first-appearance order) are shuffled with the
/// seeded RNG, then assigned whole to train, validation, and test in turn:
/// a partition keeps receiving subjects until its image count first reaches
/// its quota (`round(ratio * total images)`); the test partition takes the
/// remainder.
pub fn split_person_disjoint(
    entries: &[ManifestEntry],
    ratios: SplitRatios,
    seed: u64,
) -> Result<DatasetSplit, PipelineError> {
    let mut order: Vec<&str> = Vec::new();
    let mut by_subject: HashMap<&str, Vec<&ManifestEntry>> = HashMap::new();
    for entry in entries {
        let slot = by_subject.entry(&entry.subject_id).or_default();
        if slot.is_empty() {
            order.push(&entry.subject_id);
        }
        slot.push(entry);
    }
    if order.len() < 3 {
        return Err(PipelineError::TooFewSubjects(order.len()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let total = entries.len() as f64;
    let quotas = [
        (ratios.train * total).round() as usize,
        (ratios.validation * total).round() as usize,
    ];
    let mut partitions: [Vec<ManifestEntry>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut current = 0;
    for subject in order {
        while current < 2 && partitions[current].len() >= quotas[current] {
            current += 1;
        }
        partitions[current].extend(by_subject[subject].iter().map(|&e| e.clone()));
    }
    let [train, validation, test] = partitions;
    Ok(DatasetSplit { train, validation, test, seed })
}
