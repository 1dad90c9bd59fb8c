//! Super-resolution training orchestration over whole image sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::imagekit::{extract_patch_pairs, PatchPair, RasterImage, INPUT_PATCH, PATCH_STRIDE};
use crate::rng::derive_seed_str;
use crate::srcnn::{train_srcnn, SrcnnError, SrcnnModel, TrainConfig};

use super::PipelineError;

/// Default ceiling on the number of training patch pairs.
pub const DEFAULT_PATCH_BUDGET: usize = 100_000;

/// Outcome of [`run_sr_training`].
#[derive(Debug, Clone)]
pub struct SrTrainingReport {
    pub model: SrcnnModel,
    /// Mean training MSE per epoch, one entry per epoch.
    pub loss_history: Vec<f64>,
    /// Patch pairs actually trained on, after any budget subsampling.
    pub pairs_used: usize,
}

/// Picks which of `total` items survive a budget cap: all of them when
/// `total <= budget`, otherwise a uniform seeded draw of exactly `budget`
/// distinct indices. Returned indices are sorted ascending.
pub fn subsample_plan(total: usize, budget: usize, seed: u64) -> Vec<usize> {
    if total <= budget {
        return (0..total).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, total, budget).into_vec();
    picked.sort_unstable();
    picked
}

fn patch_grid_count(img: &RasterImage) -> usize {
    let along = |n: usize| (n - INPUT_PATCH) / PATCH_STRIDE + 1;
    along(img.height()) * along(img.width())
}

/// Trains a super-resolution network on patch pairs harvested from whole
/// images.
///
/// Every image contributes its full patch grid; when the grand total
/// exceeds `patch_budget`, a uniform seeded subsample of exactly
/// `patch_budget` pairs is kept (the subsampling stream is derived from
/// `config.seed`, separate from the training stream). Training itself runs
/// through [`train_srcnn`] with the given config.
pub fn run_sr_training(
    train_images: &[RasterImage],
    scale: usize,
    config: &TrainConfig,
    patch_budget: usize,
) -> Result<SrTrainingReport, PipelineError> {
    if train_images.is_empty() {
        return Err(SrcnnError::EmptyTrainingSet.into());
    }
    if patch_budget == 0 {
        return Err(PipelineError::BadParameter("patch budget must be at least 1".into()));
    }

    let mut total = 0usize;
    for (i, img) in train_images.iter().enumerate() {
        if img.height() < INPUT_PATCH || img.width() < INPUT_PATCH {
            return Err(crate::imagekit::ImageError::ImageTooSmall(format!(
                "training image {i} is {}x{}, smaller than a {INPUT_PATCH}x{INPUT_PATCH} patch",
                img.height(),
                img.width()
            ))
            .into());
        }
        total += patch_grid_count(img);
    }

    let plan = subsample_plan(total, patch_budget, derive_seed_str(config.seed, "patch-subsample"));
    let mut pairs: Vec<PatchPair> = Vec::with_capacity(plan.len());
    let mut cursor = 0; // next index in `plan` to satisfy
    let mut offset = 0; // global index of the current image's first pair
    for (i, img) in train_images.iter().enumerate() {
        if cursor == plan.len() {
            break;
        }
        let count = patch_grid_count(img);
        if plan[cursor] < offset + count {
            let image_pairs = extract_patch_pairs(img, scale, PATCH_STRIDE, &format!("train{i:04}"))?;
            debug_assert_eq!(image_pairs.len(), count);
            let mut keep: Vec<Option<PatchPair>> = image_pairs.into_iter().map(Some).collect();
            while cursor < plan.len() && plan[cursor] < offset + count {
                let local = plan[cursor] - offset;
                pairs.push(keep[local].take().expect("plan indices are distinct"));
                cursor += 1;
            }
        }
        offset += count;
    }
    debug_assert_eq!(pairs.len(), plan.len());

    let (model, loss_history) = train_srcnn(&pairs, config)?;
    Ok(SrTrainingReport { model, loss_history, pairs_used: pairs.len() })
}
