//! Synthetic corpus generation: two classes of procedural textures with a
//! class-dependent dominant frequency, per-subject random phase, per-image
//! jitter, and additive noise. Used wherever a labeled periocular dataset
//! is needed but none is available.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::imagekit::{save_image, RasterImage};
use crate::rng::derive_seed;

use super::manifest::MANIFEST_HEADER;
use super::PipelineError;

/// Side length of every generated image.
const IMAGE_SIZE: usize = 150;
/// Mean intensity of the texture.
const BASE_LEVEL: f64 = 0.47;
/// Amplitude of each of the two sinusoidal components.
const WAVE_AMPLITUDE: f64 = 0.12;
/// Dominant frequency (cycles across the image) for class F subjects.
const CYCLES_CLASS_F: f64 = 54.0;
/// Dominant frequency (cycles across the image) for class M subjects.
const CYCLES_CLASS_M: f64 = 60.0;
/// Per-subject phase offsets are drawn uniformly from [0, this].
const PHASE_SPREAD: f64 = 0.6;
/// Per-image phase jitter is drawn uniformly from [0, this].
const JITTER_SPREAD: f64 = 0.08;
/// Per-pixel additive noise is drawn uniformly from [-this, this].
const NOISE_LEVEL: f64 = 0.02;

/// Outcome of [`generate_synthetic_corpus`].
#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub manifest_path: PathBuf,
    pub image_count: usize,
}

/// Generates a deterministic two-class corpus of 150x150 grayscale textures
/// under `out_dir`, plus a manifest CSV describing every image.
///
/// Subjects alternate class by parity (even index → F, odd → M). Each
/// subject gets its own random phase so that no two subjects share a
/// texture, and each image adds a small phase jitter and pixel noise so
/// that no two images of a subject are identical. Images alternate eye
/// label (even image index → L, odd → R).
pub fn generate_synthetic_corpus(
    n_subjects: usize,
    images_per_subject: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<SynthesisReport, PipelineError> {
    if n_subjects < 4 || n_subjects % 2 != 0 {
        return Err(PipelineError::BadParameter(format!(
            "subject count must be an even number of at least 4, got {n_subjects}"
        )));
    }
    if images_per_subject == 0 {
        return Err(PipelineError::BadParameter("images per subject must be at least 1".into()));
    }

    fs::create_dir_all(out_dir)?;
    let mut manifest = MANIFEST_HEADER.join(",");
    manifest.push('\n');

    let mut image_count = 0;
    for s in 0..n_subjects {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, s as u64));
        let cycles = if s % 2 == 0 { CYCLES_CLASS_F } else { CYCLES_CLASS_M };
        let omega = 2.0 * std::f64::consts::PI * cycles / IMAGE_SIZE as f64;
        let phase_x = rng.gen_range(0.0..=PHASE_SPREAD);
        let phase_y = rng.gen_range(0.0..=PHASE_SPREAD);

        for i in 0..images_per_subject {
            let jitter_x = rng.gen_range(0.0..=JITTER_SPREAD);
            let jitter_y = rng.gen_range(0.0..=JITTER_SPREAD);
            let mut img = RasterImage::filled(IMAGE_SIZE, IMAGE_SIZE, 1, 0.0)?;
            for y in 0..IMAGE_SIZE {
                let row_wave = WAVE_AMPLITUDE * (omega * y as f64 + phase_y + jitter_y).sin();
                for x in 0..IMAGE_SIZE {
                    let col_wave = WAVE_AMPLITUDE * (omega * x as f64 + phase_x + jitter_x).sin();
                    let noise = rng.gen_range(-NOISE_LEVEL..=NOISE_LEVEL);
                    img.set(y, x, 0, BASE_LEVEL + col_wave + row_wave + noise);
                }
            }

            let eye = if i % 2 == 0 { "L" } else { "R" };
            let sex = if s % 2 == 0 { "F" } else { "M" };
            let file_name = format!("subj{s:03}_img{i:02}_{eye}.png");
            save_image(&img, &out_dir.join(&file_name))?;
            manifest.push_str(&format!("{file_name},subj{s:03},{sex},{eye},synthetic\n"));
            image_count += 1;
        }
    }

    let manifest_path = out_dir.join("manifest.csv");
    fs::write(&manifest_path, manifest)?;
    Ok(SynthesisReport { manifest_path, image_count })
}
