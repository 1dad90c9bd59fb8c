//! Random-forest classification: impurity criteria, threshold split search,
//! recursive tree growth, bootstrap ensembles, image featurization, and
//! versioned binary model storage.

mod ensemble;
mod features;
mod impurity;
mod serial;
mod split;
mod tree;

pub use ensemble::{fit_forest, ForestParams, RandomForest};
pub use features::{extract_features, FeatureConfig};
pub use impurity::{
    deviance_impurity, gini_impurity, split_score, twoing_score, ClassCounts, ImpurityKind,
};
pub use serial::{forest_from_bytes, forest_to_bytes, load_forest, save_forest};
pub use split::{best_split, Dataset, SplitCandidate};
pub use tree::{grow_tree, TreeNode, TreeParams};

/// Errors for forest training, prediction, and model files.
#[derive(Debug, thiserror::Error)]
pub enum ForestError {
    /// Impurity of an empty sample set is undefined.
    #[error("cannot compute impurity of an empty node")]
    EmptyNode,

    /// A split score needs at least one sample on one side.
    #[error("cannot score a split with both sides empty")]
    BothSidesEmpty,

    /// Child counts do not partition the parent counts.
    #[error("inconsistent class counts: {0}")]
    CountMismatch(String),

    /// Tree growth requires at least one sample.
    #[error("cannot grow a tree from an empty sample set")]
    EmptySampleSet,

    /// Forest training requires at least two samples spanning two classes.
    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),

    /// A feature vector's length differs from the training data's.
    #[error("feature length mismatch: {0}")]
    FeatureLengthMismatch(String),

    /// A parameter is outside its documented range.
    #[error("bad parameter: {0}")]
    BadParameter(String),

    /// The file does not start with the forest format magic.
    #[error("not a forest model file (bad magic)")]
    BadMagic,

    /// The file's format version is newer than this build understands.
    #[error("unsupported forest format version {0}")]
    VersionUnsupported(u32),

    /// The file's checksum does not match its contents.
    #[error("forest file checksum mismatch (corrupt or truncated)")]
    ChecksumMismatch,

    /// The file is structurally invalid despite a correct checksum.
    #[error("malformed forest file: {0}")]
    MalformedForest(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
