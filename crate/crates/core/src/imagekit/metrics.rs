//! Image quality metrics.

use super::raster::{ImageError, RasterImage};

/// Peak signal-to-noise ratio in decibels, with peak 1.0 (intensities are
/// normalized). Returns `f64::INFINITY` for identical images.
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64, ImageError> {
    if a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels() {
        return Err(ImageError::ShapeMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.height(),
            a.width(),
            a.channels(),
            b.height(),
            b.width(),
            b.channels()
        )));
    }
    let n = a.data().len() as f64;
    let mse: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (1.0 / mse).log10())
    }
}
