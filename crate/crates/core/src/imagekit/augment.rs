//! Geometric augmentation: zoom, rotation, and shift about the image
//! center, resampled bilinearly with nearest-pixel fill.
//!
//! There is deliberately no horizontal-mirror operation anywhere in this
//! module: periocular images are side-specific (left/right eye), so
//! mirroring would corrupt the labels.

use super::raster::{ImageError, RasterImage};

/// Parameters of one augmentation draw. Construction validates the ranges;
/// the neutral value of every field is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentParams {
    rotation_degrees: f64,
    shift_x_fraction: f64,
    shift_y_fraction: f64,
    zoom_fraction: f64,
}

impl AugmentParams {
    pub const ROTATION_LIMIT: f64 = 10.0;
    pub const SHIFT_LIMIT: f64 = 0.2;
    pub const ZOOM_LIMIT: f64 = 0.15;

    pub fn new(
        rotation_degrees: f64,
        shift_x_fraction: f64,
        shift_y_fraction: f64,
        zoom_fraction: f64,
    ) -> Result<Self, ImageError> {
        fn check(name: &str, v: f64, limit: f64) -> Result<(), ImageError> {
            if !v.is_finite() || v.abs() > limit {
                return Err(ImageError::BadParameter(format!(
                    "{name} must lie in [-{limit}, {limit}], got {v}"
                )));
            }
            Ok(())
        }
        check("rotation_degrees", rotation_degrees, Self::ROTATION_LIMIT)?;
        check("shift_x_fraction", shift_x_fraction, Self::SHIFT_LIMIT)?;
        check("shift_y_fraction", shift_y_fraction, Self::SHIFT_LIMIT)?;
        check("zoom_fraction", zoom_fraction, Self::ZOOM_LIMIT)?;
        Ok(Self {
            rotation_degrees,
            shift_x_fraction,
            shift_y_fraction,
            zoom_fraction,
        })
    }

    /// The identity transform.
    pub fn neutral() -> Self {
        Self {
            rotation_degrees: 0.0,
            shift_x_fraction: 0.0,
            shift_y_fraction: 0.0,
            zoom_fraction: 0.0,
        }
    }

    pub fn rotation_degrees(&self) -> f64 {
        self.rotation_degrees
    }

    pub fn shift_x_fraction(&self) -> f64 {
        self.shift_x_fraction
    }

    pub fn shift_y_fraction(&self) -> f64 {
        self.shift_y_fraction
    }

    pub fn zoom_fraction(&self) -> f64 {
        self.zoom_fraction
    }
}

/// Applies zoom (factor `1 + zoom_fraction`) about the center, then
/// rotation about the center, then a shift of
/// `(shift_x_fraction * width, shift_y_fraction * height)` pixels.
///
/// The output has the input's dimensions. Sampling is bilinear; source
/// coordinates falling outside the image take the nearest in-bounds pixel.
pub fn augment(img: &RasterImage, params: &AugmentParams) -> RasterImage {
    let (h, w, channels) = (img.height(), img.width(), img.channels());
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let tx = params.shift_x_fraction * w as f64;
    let ty = params.shift_y_fraction * h as f64;
    let zoom = 1.0 + params.zoom_fraction;
    let theta = params.rotation_degrees.to_radians();
    let (sin, cos) = theta.sin_cos();

    // Output pixels pull from the source: invert shift, then rotation
    // (transpose), then zoom.
    let mut out = vec![0f64; h * w * channels];
    for y in 0..h {
        for x in 0..w {
            let dx = x as f64 - cx - tx;
            let dy = y as f64 - cy - ty;
            let rx = cos * dx + sin * dy;
            let ry = -sin * dx + cos * dy;
            let sx = rx / zoom + cx;
            let sy = ry / zoom + cy;
            let base = (y * w + x) * channels;
            for c in 0..channels {
                out[base + c] = sample_bilinear(img, sy, sx, c);
            }
        }
    }
    RasterImage::from_clamped(h, w, channels, out)
}

/// Bilinear sample at a continuous position; coordinates outside the image
/// are clamped first, which realizes nearest-pixel fill at the borders.
#[inline]
fn sample_bilinear(img: &RasterImage, y: f64, x: f64, c: usize) -> f64 {
    let y = y.clamp(0.0, img.height() as f64 - 1.0);
    let x = x.clamp(0.0, img.width() as f64 - 1.0);
    let y0 = y.floor() as usize;
    let x0 = x.floor() as usize;
    let y1 = (y0 + 1).min(img.height() - 1);
    let x1 = (x0 + 1).min(img.width() - 1);
    let fy = y - y0 as f64;
    let fx = x - x0 as f64;
    let top = img.get(y0, x0, c) * (1.0 - fx) + img.get(y0, x1, c) * fx;
    let bot = img.get(y1, x0, c) * (1.0 - fx) + img.get(y1, x1, c) * fx;
    top * (1.0 - fy) + bot * fy
}
