//! Bootstrap ensembles of decision trees with majority-vote prediction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::features::FeatureConfig;
use super::impurity::ImpurityKind;
use super::split::Dataset;
use super::tree::{grow_tree, TreeNode, TreeParams};
use super::ForestError;

/// Ensemble training knobs on top of the per-tree limits.
#[derive(Debug, Clone)]
pub struct ForestParams {
    pub tree: TreeParams,
    /// Draw each tree's training set as `n` samples with replacement.
    /// Disabled, every tree sees the full dataset.
    pub bootstrap: bool,
    /// Recorded into the forest so image featurization at prediction time
    /// can reproduce what training used.
    pub feature_config: FeatureConfig,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            tree: TreeParams::default(),
            bootstrap: true,
            feature_config: FeatureConfig::default(),
        }
    }
}

/// A trained ensemble. Immutable once built; prediction is pure.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<TreeNode>,
    kind: ImpurityKind,
    seed: u64,
    feature_config: FeatureConfig,
    n_classes: usize,
    n_features: usize,
}

impl RandomForest {
    pub(crate) fn from_parts(
        trees: Vec<TreeNode>,
        kind: ImpurityKind,
        seed: u64,
        feature_config: FeatureConfig,
        n_classes: usize,
        n_features: usize,
    ) -> Self {
        Self { trees, kind, seed, feature_config, n_classes, n_features }
    }

    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    pub fn kind(&self) -> ImpurityKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.feature_config
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Majority vote over all trees. Returns the winning class (ties go to
    /// the lower class index) and the per-class vote fractions, which sum
    /// to 1.
    pub fn predict(&self, features: &[f64]) -> Result<(usize, Vec<f64>), ForestError> {
        if features.len() != self.n_features {
            return Err(ForestError::FeatureLengthMismatch(format!(
                "got {} features, forest was trained on {}",
                features.len(),
                self.n_features
            )));
        }
        let mut votes = vec![0usize; self.n_classes];
        for tree in &self.trees {
            votes[tree.predict(features)] += 1;
        }
        let class = votes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(c, _)| c)
            .expect("forests always hold at least one class");
        let total = self.trees.len() as f64;
        let fractions = votes.iter().map(|&v| v as f64 / total).collect();
        Ok((class, fractions))
    }
}

/// Trains `n_trees` trees, each on its own seeded bootstrap draw.
///
/// Per-tree RNG streams are derived as `seed XOR tree_index` (bootstrap
/// indices drawn first, then feature subsets), so every tree's content is
/// independent of training order and the whole forest is a deterministic
/// function of its inputs. `features_per_split` defaults to
/// `ceil(sqrt(feature count))` when unset.
pub fn fit_forest(
    data: &Dataset,
    n_trees: usize,
    kind: ImpurityKind,
    seed: u64,
    params: &ForestParams,
) -> Result<RandomForest, ForestError> {
    if n_trees == 0 {
        return Err(ForestError::BadParameter("n_trees must be at least 1".into()));
    }
    let n = data.n_samples();
    if n < 2 {
        return Err(ForestError::DegenerateDataset(format!(
            "{n} sample(s); at least 2 required"
        )));
    }
    let first = data.label(0);
    if (1..n).all(|i| data.label(i) == first) {
        return Err(ForestError::DegenerateDataset(
            "all samples share one class; at least 2 classes required".into(),
        ));
    }

    let m = params
        .tree
        .features_per_split
        .unwrap_or_else(|| (data.n_features() as f64).sqrt().ceil() as usize);
    let tree_params = TreeParams { features_per_split: Some(m), ..params.tree.clone() };

    let trees: Vec<TreeNode> = (0..n_trees as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t);
            let indices: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_tree(data, &indices, kind, &tree_params, &mut rng)
        })
        .collect::<Result<_, _>>()?;

    Ok(RandomForest {
        trees,
        kind,
        seed,
        feature_config: params.feature_config,
        n_classes: data.n_classes(),
        n_features: data.n_features(),
    })
}
