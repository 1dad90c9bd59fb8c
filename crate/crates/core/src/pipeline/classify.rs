//! Per-eye sex-classification experiment: augment the train partition,
//! optionally super-resolve, extract grid features, fit a forest, and score
//! on the held-out test partition.

use crate::forest::{fit_forest, extract_features, Dataset, FeatureConfig, ForestParams, ImpurityKind};
use crate::imagekit::{load_image, RasterImage};
use crate::rng::derive_seed_str;
use crate::srcnn::{upscale, SrcnnModel};

use super::augmentset::build_augmented_set;
use super::manifest::{Eye, ManifestEntry};
use super::splitting::DatasetSplit;
use super::PipelineError;

/// Augmentation factor applied to the train partition before fitting.
pub(crate) const TRAIN_AUGMENT_FACTOR: usize = 3;

/// Test accuracy (percent) for each eye.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeAccuracy {
    pub left: f64,
    pub right: f64,
}

/// Feature matrices for one eye, ready for forest fitting and scoring.
pub(crate) struct EyeData {
    pub(crate) train_x: Vec<Vec<f64>>,
    pub(crate) train_y: Vec<usize>,
    pub(crate) test_x: Vec<Vec<f64>>,
    pub(crate) test_y: Vec<usize>,
}

fn entries_for_eye(entries: &[ManifestEntry], eye: Eye) -> Vec<ManifestEntry> {
    entries.iter().filter(|e| e.eye == eye).cloned().collect()
}

fn validate_scale(scale: usize) -> Result<(), PipelineError> {
    if !(1..=3).contains(&scale) {
        return Err(PipelineError::BadParameter(format!(
            "classification scale must be 1, 2, or 3, got {scale}"
        )));
    }
    Ok(())
}

/// Builds the per-eye train/test feature matrices: filter both partitions to
/// one eye, augment the train side, apply the scale transform to every image,
/// and extract grid features.
pub(crate) fn prepare_eye_data(
    split: &DatasetSplit,
    scale: usize,
    sr_model: Option<&SrcnnModel>,
    seed: u64,
    eye: Eye,
    cfg: &FeatureConfig,
) -> Result<EyeData, PipelineError> {
    validate_scale(scale)?;
    let model = if scale > 1 {
        Some(sr_model.ok_or_else(|| {
            PipelineError::MissingModel(format!(
                "scale {scale} requires a super-resolution model; none was supplied"
            ))
        })?)
    } else {
        None
    };

    let train_entries = entries_for_eye(&split.train, eye);
    if train_entries.is_empty() {
        return Err(PipelineError::EmptyPartition(format!("train/{eye}")));
    }
    let test_entries = entries_for_eye(&split.test, eye);
    if test_entries.is_empty() {
        return Err(PipelineError::EmptyPartition(format!("test/{eye}")));
    }

    let transform = |img: &RasterImage| -> Result<RasterImage, PipelineError> {
        match model {
            Some(m) => Ok(upscale(m, img, scale)?),
            None => Ok(img.clone()),
        }
    };

    let augment_seed = derive_seed_str(seed, &format!("augment/{eye}"));
    let augmented = build_augmented_set(&train_entries, TRAIN_AUGMENT_FACTOR, augment_seed)?;
    let mut train_x = Vec::with_capacity(augmented.len());
    let mut train_y = Vec::with_capacity(augmented.len());
    for (img, sex) in &augmented {
        train_x.push(extract_features(&transform(img)?, cfg));
        train_y.push(sex.class_index());
    }

    let mut test_x = Vec::with_capacity(test_entries.len());
    let mut test_y = Vec::with_capacity(test_entries.len());
    for entry in &test_entries {
        let img = load_image(&entry.image_path)?;
        test_x.push(extract_features(&transform(&img)?, cfg));
        test_y.push(entry.sex.class_index());
    }

    Ok(EyeData { train_x, train_y, test_x, test_y })
}

/// Fits a forest on the prepared train matrix and returns test accuracy as a
/// percentage.
pub(crate) fn fit_and_score(
    eye_data: &EyeData,
    kind: ImpurityKind,
    n_trees: usize,
    forest_seed: u64,
) -> Result<f64, PipelineError> {
    let data = Dataset::from_rows(&eye_data.train_x, &eye_data.train_y)?;
    let forest = fit_forest(&data, n_trees, kind, forest_seed, &ForestParams::default())?;
    let mut correct = 0usize;
    for (x, &y) in eye_data.test_x.iter().zip(&eye_data.test_y) {
        let (predicted, _) = forest.predict(x)?;
        if predicted == y {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / eye_data.test_x.len() as f64)
}

/// Runs the sex-classification experiment for one (scale, impurity, trees)
/// cell and reports test accuracy per eye.
///
/// Scale 1 scores the images as-is; scales 2 and 3 pass every image through
/// the supplied super-resolution model first. The train partition is
/// augmented threefold before fitting.
pub fn run_classification_experiment(
    split: &DatasetSplit,
    scale: usize,
    sr_model: Option<&SrcnnModel>,
    kind: ImpurityKind,
    n_trees: usize,
    seed: u64,
) -> Result<EyeAccuracy, PipelineError> {
    validate_scale(scale)?;
    if scale > 1 && sr_model.is_none() {
        return Err(PipelineError::MissingModel(format!(
            "scale {scale} requires a super-resolution model; none was supplied"
        )));
    }

    let cfg = FeatureConfig::default();
    let mut per_eye = [0.0f64; 2];
    for (slot, eye) in per_eye.iter_mut().zip(Eye::BOTH) {
        let data = prepare_eye_data(split, scale, sr_model, seed, eye, &cfg)?;
        let forest_seed = derive_seed_str(seed, &format!("forest/{eye}"));
        *slot = fit_and_score(&data, kind, n_trees, forest_seed)?;
    }
    Ok(EyeAccuracy { left: per_eye[0], right: per_eye[1] })
}
