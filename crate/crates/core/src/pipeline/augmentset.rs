//! Training-set expansion through seeded random augmentation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::imagekit::{augment, load_image, AugmentParams, RasterImage};

use super::manifest::ManifestEntry;
use super::PipelineError;

/// Loads every entry's image and appends `factor - 1` randomly augmented
/// copies of each, labeled with the entry's sex.
///
/// Augmentation parameters are drawn uniformly from their legal ranges
/// (rotation, shift x, shift y, zoom — never mirroring) from one RNG stream
/// over the entries in order, so a seed fully determines the output. Meant
/// for training partitions only; evaluation images should stay pristine.
pub fn build_augmented_set(
    entries: &[ManifestEntry],
    factor: usize,
    seed: u64,
) -> Result<Vec<(RasterImage, crate::pipeline::Sex)>, PipelineError> {
    if factor == 0 {
        return Err(PipelineError::BadParameter("augmentation factor must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(entries.len() * factor);
    for entry in entries {
        let img = load_image(&entry.image_path)?;
        for copy in 0..factor {
            if copy == 0 {
                out.push((img.clone(), entry.sex));
                continue;
            }
            let rotation = rng.gen_range(-AugmentParams::ROTATION_LIMIT..=AugmentParams::ROTATION_LIMIT);
            let shift_x = rng.gen_range(-AugmentParams::SHIFT_LIMIT..=AugmentParams::SHIFT_LIMIT);
            let shift_y = rng.gen_range(-AugmentParams::SHIFT_LIMIT..=AugmentParams::SHIFT_LIMIT);
            let zoom = rng.gen_range(-AugmentParams::ZOOM_LIMIT..=AugmentParams::ZOOM_LIMIT);
            let params = AugmentParams::new(rotation, shift_x, shift_y, zoom)
                .expect("draws stay inside the legal ranges");
            out.push((augment(&img, &params), entry.sex));
        }
    }
    Ok(out)
}
