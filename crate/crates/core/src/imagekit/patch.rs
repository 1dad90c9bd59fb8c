//! Training-pair extraction: degraded input patches with pristine targets.
//!
//! The degradation model is bicubic down-then-up at the requested scale, so
//! a network trained on these pairs learns to invert bicubic blur. Input
//! patches are 25x25; targets are the co-located pristine 13x13 centers,
//! matching the 12-pixel shrink of three valid convolutions (9, 1, 5).

use super::raster::{ImageError, RasterImage};
use super::resize::bicubic_resize;

/// Side length of the degraded input patch.
pub const INPUT_PATCH: usize = 25;
/// Side length of the pristine target patch.
pub const TARGET_PATCH: usize = 13;
/// Offset of the target window inside the input window, both axes.
pub const TARGET_OFFSET: usize = 6;
/// Default grid stride between patch origins.
pub const PATCH_STRIDE: usize = 15;

/// One supervised training pair.
#[derive(Debug, Clone)]
pub struct PatchPair {
    input: RasterImage,
    target: RasterImage,
    source_id: String,
}

impl PatchPair {
    /// Builds a pair, enforcing the 25x25 input / 13x13 target geometry and
    /// matching channel counts.
    pub fn new(input: RasterImage, target: RasterImage, source_id: String) -> Result<Self, ImageError> {
        if input.height() != INPUT_PATCH || input.width() != INPUT_PATCH {
            return Err(ImageError::ShapeMismatch(format!(
                "input patch must be {INPUT_PATCH}x{INPUT_PATCH}, got {}x{}",
                input.height(),
                input.width()
            )));
        }
        if target.height() != TARGET_PATCH || target.width() != TARGET_PATCH {
            return Err(ImageError::ShapeMismatch(format!(
                "target patch must be {TARGET_PATCH}x{TARGET_PATCH}, got {}x{}",
                target.height(),
                target.width()
            )));
        }
        if input.channels() != target.channels() {
            return Err(ImageError::ShapeMismatch(format!(
                "input has {} channels but target has {}",
                input.channels(),
                target.channels()
            )));
        }
        Ok(Self { input, target, source_id })
    }

    pub fn input(&self) -> &RasterImage {
        &self.input
    }

    pub fn target(&self) -> &RasterImage {
        &self.target
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }
}

/// Extracts training pairs from a pristine image on a regular grid.
///
/// The whole image is degraded once (bicubic down to `floor(dim/scale)`,
/// then back up), after which 25x25 windows of the degraded image are paired
/// with the pristine 13x13 windows at offset `(+6, +6)`. Grid origins run
/// `0, stride, 2*stride, ...` along each axis as long as the 25x25 window
/// fits; pairs are emitted row-major. `source` tags each pair's provenance.
pub fn extract_patch_pairs(
    hr: &RasterImage,
    scale: usize,
    stride: usize,
    source: &str,
) -> Result<Vec<PatchPair>, ImageError> {
    if !(2..=3).contains(&scale) {
        return Err(ImageError::InvalidDimensions(format!("scale must be 2 or 3, got {scale}")));
    }
    if stride == 0 {
        return Err(ImageError::InvalidDimensions("stride must be at least 1".into()));
    }
    if hr.height() < INPUT_PATCH || hr.width() < INPUT_PATCH {
        return Err(ImageError::ImageTooSmall(format!(
            "{}x{} image cannot host a {INPUT_PATCH}x{INPUT_PATCH} patch",
            hr.height(),
            hr.width()
        )));
    }

    let degraded = degrade(hr, scale)?;

    let mut pairs = Vec::new();
    let mut y = 0;
    while y + INPUT_PATCH <= hr.height() {
        let mut x = 0;
        while x + INPUT_PATCH <= hr.width() {
            let input = degraded.crop(y, x, INPUT_PATCH, INPUT_PATCH)?;
            let target = hr.crop(y + TARGET_OFFSET, x + TARGET_OFFSET, TARGET_PATCH, TARGET_PATCH)?;
            pairs.push(PatchPair::new(input, target, format!("{source}#y{y}x{x}"))?);
            x += stride;
        }
        y += stride;
    }
    Ok(pairs)
}

/// Bicubic down-then-up degradation at the given scale. The intermediate
/// size is `floor(dim/scale)` per axis.
pub(crate) fn degrade(hr: &RasterImage, scale: usize) -> Result<RasterImage, ImageError> {
    let low = bicubic_resize(hr, hr.height() / scale, hr.width() / scale)?;
    bicubic_resize(&low, hr.height(), hr.width())
}
