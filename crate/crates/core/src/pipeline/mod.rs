//! Experiment orchestration: dataset manifests, person-disjoint splits,
//! augmentation batches, super-resolution training runs, the classification
//! experiment matrix, hyperparameter grid search, synthetic corpus
//! generation, and result/provenance emission.

mod augmentset;
mod classify;
mod experiment;
mod grid;
mod manifest;
mod provenance;
mod results;
mod splitting;
mod srtrain;
mod synth;

pub use augmentset::build_augmented_set;
pub use classify::{run_classification_experiment, EyeAccuracy};
pub use experiment::{run_full_experiment, ExperimentOptions, ExperimentSummary};
pub use grid::{
    grid_search, grid_search_limited, grid_search_with, write_grid_ledger, GridRow, GridSpec,
};
pub use manifest::{load_manifest, Eye, ManifestEntry, Sex, MANIFEST_HEADER};
pub use provenance::{sha256_file, sha256_hex, write_provenance, InputRecord};
pub use results::{
    emit_results_table, write_results_csv, CellResult, ResultsTable, TABLE_SCALES,
    TABLE_TREE_COUNTS,
};
pub use splitting::{split_person_disjoint, DatasetSplit, SplitRatios};
pub use srtrain::{run_sr_training, subsample_plan, SrTrainingReport, DEFAULT_PATCH_BUDGET};
pub use synth::{generate_synthetic_corpus, SynthesisReport};

use crate::forest::ForestError;
use crate::imagekit::ImageError;
use crate::srcnn::SrcnnError;

/// Errors raised while orchestrating datasets and experiments.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    /// A manifest row (or the header) could not be parsed.
    #[error("manifest parse error at line {line}: {msg}")]
    ParseError { line: u64, msg: String },

    /// Two manifest rows name the same image file.
    #[error("duplicate image path in manifest: {0}")]
    DuplicatePath(String),

    /// A sex or eye column holds an unrecognized value.
    #[error("unknown label {value:?} at manifest line {line}")]
    UnknownLabel { line: u64, value: String },

    /// Person-disjoint splitting needs at least three distinct subjects.
    #[error("need at least 3 distinct subjects, found {0}")]
    TooFewSubjects(usize),

    /// An upscaling experiment was requested without its model.
    #[error("missing super-resolution model: {0}")]
    MissingModel(String),

    /// A train or test partition holds no images for an eye.
    #[error("empty partition: {0}")]
    EmptyPartition(String),

    /// Grid search needs at least one validation pair.
    #[error("grid search requires a non-empty validation set")]
    EmptyValidationSet,

    /// A results table is missing one or more cells.
    #[error("incomplete results: {0}")]
    IncompleteResults(String),

    /// A parameter is outside its documented range.
    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error(transparent)]
    Image(#[from] ImageError),

    #[error(transparent)]
    Srcnn(#[from] SrcnnError),

    #[error(transparent)]
    Forest(#[from] ForestError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json encoding error: {0}")]
    Json(#[from] serde_json::Error),
}
