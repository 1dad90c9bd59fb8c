//! Image-to-feature-vector conversion for the classifier.

use crate::imagekit::{bicubic_resize, RasterImage};

use super::ForestError;

/// How an image is turned into a feature vector: optional grayscale
/// conversion followed by a bicubic resample onto a fixed grid whose pixels
/// are flattened row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureConfig {
    grid_h: usize,
    grid_w: usize,
    grayscale: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { grid_h: 48, grid_w: 48, grayscale: true }
    }
}

impl FeatureConfig {
    /// Builds a config, rejecting empty grids.
    pub fn new(grid_h: usize, grid_w: usize, grayscale: bool) -> Result<Self, ForestError> {
        if grid_h == 0 || grid_w == 0 {
            return Err(ForestError::BadParameter(format!(
                "feature grid {grid_h}x{grid_w} must be at least 1x1"
            )));
        }
        Ok(Self { grid_h, grid_w, grayscale })
    }

    pub fn grid_h(&self) -> usize {
        self.grid_h
    }

    pub fn grid_w(&self) -> usize {
        self.grid_w
    }

    pub fn grayscale(&self) -> bool {
        self.grayscale
    }

    /// Length of the vectors `extract_features` produces under this config
    /// for inputs with the matching channel count.
    pub fn feature_len(&self, channels: usize) -> usize {
        let c = if self.grayscale { 1 } else { channels };
        self.grid_h * self.grid_w * c
    }
}

/// Converts an image into a flat feature vector per `cfg`. Values stay in
/// `[0, 1]`.
pub fn extract_features(img: &RasterImage, cfg: &FeatureConfig) -> Vec<f64> {
    let gray;
    let source = if cfg.grayscale && img.channels() != 1 {
        gray = img.to_grayscale();
        &gray
    } else {
        img
    };
    let resized = bicubic_resize(source, cfg.grid_h, cfg.grid_w)
        .expect("validated config has non-zero grid dimensions");
    resized.data().to_vec()
}
