//! Single decision trees: recursive growth and prediction.

use rand::Rng;

use super::impurity::{ClassCounts, ImpurityKind};
use super::split::{best_split, Dataset};
use super::ForestError;

/// One node of a decision tree. Internal nodes route on
/// `value[feature] < threshold` (left when true); leaves carry the majority
/// class and the training-label histogram that produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        class: usize,
        histogram: Vec<u64>,
    },
}

impl TreeNode {
    /// Routes a feature vector to its leaf and returns the predicted class.
    pub fn predict(&self, features: &[f64]) -> usize {
        match self {
            TreeNode::Leaf { class, .. } => *class,
            TreeNode::Internal { feature, threshold, left, right } => {
                if features[*feature] < *threshold {
                    left.predict(features)
                } else {
                    right.predict(features)
                }
            }
        }
    }

    /// Longest root-to-leaf path length in edges; a lone leaf has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Total number of nodes, leaves included.
    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }
}

/// Growth limits for a single tree.
#[derive(Debug, Clone)]
pub struct TreeParams {
    /// Maximum depth in edges; `None` grows until other criteria stop it.
    pub max_depth: Option<usize>,
    /// Minimum samples a leaf may hold; nodes with fewer than twice this
    /// many samples are not split.
    pub min_leaf: usize,
    /// Candidate features drawn (without replacement) at each split;
    /// `None` considers every feature.
    pub features_per_split: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: None, min_leaf: 1, features_per_split: None }
    }
}

impl TreeParams {
    fn validate(&self, n_features: usize) -> Result<(), ForestError> {
        if self.min_leaf == 0 {
            return Err(ForestError::BadParameter("min_leaf must be at least 1".into()));
        }
        if let Some(m) = self.features_per_split {
            if m == 0 || m > n_features {
                return Err(ForestError::BadParameter(format!(
                    "features_per_split {m} out of range 1..={n_features}"
                )));
            }
        }
        Ok(())
    }
}

/// Grows one decision tree over `indices` rows of `data`.
///
/// Recursion stops at pure nodes, at `max_depth`, when a node holds fewer
/// than `2 * min_leaf` samples, or when no candidate split scores above
/// zero; each stop emits a majority-class leaf (ties go to the lower class
/// index). Feature subsets are drawn from `rng` at every split, so the same
/// seed reproduces the same tree.
pub fn grow_tree<R: Rng>(
    data: &Dataset,
    indices: &[usize],
    kind: ImpurityKind,
    params: &TreeParams,
    rng: &mut R,
) -> Result<TreeNode, ForestError> {
    if indices.is_empty() {
        return Err(ForestError::EmptySampleSet);
    }
    params.validate(data.n_features())?;
    Ok(grow_node(data, indices.to_vec(), kind, params, rng, 0))
}

fn grow_node<R: Rng>(
    data: &Dataset,
    indices: Vec<usize>,
    kind: ImpurityKind,
    params: &TreeParams,
    rng: &mut R,
    depth: usize,
) -> TreeNode {
    let counts = data.tally(&indices);
    let make_leaf = |counts: ClassCounts| TreeNode::Leaf {
        class: counts.majority_class(),
        histogram: counts.counts().to_vec(),
    };

    if counts.is_pure()
        || params.max_depth.is_some_and(|d| depth >= d)
        || indices.len() < 2 * params.min_leaf
    {
        return make_leaf(counts);
    }

    // The feature draw happens even when the node will turn out unsplittable,
    // keeping the random stream a pure function of tree shape decisions made
    // so far rather than of data values.
    let m = params.features_per_split.unwrap_or(data.n_features());
    let candidates: Vec<usize> =
        rand::seq::index::sample(rng, data.n_features(), m).into_vec();

    let Some(split) = best_split(data, &indices, &candidates, kind) else {
        return make_leaf(counts);
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| data.value(i, split.feature) < split.threshold);
    debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());

    let left = grow_node(data, left_idx, kind, params, rng, depth + 1);
    let right = grow_node(data, right_idx, kind, params, rng, depth + 1);
    TreeNode::Internal {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}
