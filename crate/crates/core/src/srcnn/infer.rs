//! Full-image super-resolution inference.

use crate::imagekit::{bicubic_resize, RasterImage};

use super::model::{forward_into, ForwardCache, SrcnnModel, TOTAL_SHRINK};
use super::tensor::Tensor3;
use super::SrcnnError;

/// Pad width applied before the forward pass so the network's 12-pixel
/// shrink cancels out and the output matches the upscaled size exactly.
const PAD: usize = TOTAL_SHRINK / 2;

/// Reflects index `i` (possibly negative or past the end) into `[0, n)`
/// without repeating the border sample, i.e. `-1 -> 1`, `n -> n-2`.
#[inline]
fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    let period = 2 * n - 2;
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - m;
    }
    m as usize
}

/// Pads a tensor by `pad` pixels on every side with mirror reflection.
fn reflect_pad(t: &Tensor3, pad: usize) -> Tensor3 {
    let (c, h, w) = t.shape();
    let mut out = Tensor3::zeros(c, h + 2 * pad, w + 2 * pad);
    for ch in 0..c {
        for y in 0..h + 2 * pad {
            let sy = reflect(y as i64 - pad as i64, h);
            for x in 0..w + 2 * pad {
                let sx = reflect(x as i64 - pad as i64, w);
                out.set(ch, y, x, t.get(ch, sy, sx));
            }
        }
    }
    out
}

/// Upscales an image by the integer factor: bicubic to the target size,
/// then a network refinement pass. Reflection padding keeps the output at
/// exactly `(scale * h, scale * w)`; intensities are clamped to `[0, 1]`.
pub fn upscale(model: &SrcnnModel, img: &RasterImage, scale: usize) -> Result<RasterImage, SrcnnError> {
    if !(2..=3).contains(&scale) {
        return Err(SrcnnError::BadConfig(format!("scale must be 2 or 3, got {scale}")));
    }
    if img.channels() != model.channels() {
        return Err(SrcnnError::ChannelMismatch(format!(
            "model expects {} channels, image has {}",
            model.channels(),
            img.channels()
        )));
    }
    let up = bicubic_resize(img, img.height() * scale, img.width() * scale)
        .map_err(|e| SrcnnError::BadConfig(e.to_string()))?;
    let padded = reflect_pad(&Tensor3::from_image(&up), PAD);
    let mut cache = ForwardCache::empty();
    forward_into(model, &padded, &mut cache)?;
    cache.output().to_image()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srcnn::layer::{Activation, ConvLayer};
    use crate::srcnn::model::ModelMetadata;

    /// A model whose three layers compose to the identity on non-negative
    /// inputs: layer 1 routes the input through channel 0's center tap,
    /// layer 2 forwards channel 0, layer 3 reads channel 0's center tap.
    fn identity_model() -> SrcnnModel {
        let mut l1 = ConvLayer::zeros(64, 1, 9, 9, Activation::ReLU).unwrap();
        l1.weights_mut()[4 * 9 + 4] = 1.0; // filter 0, center of the 9x9
        let mut l2 = ConvLayer::zeros(32, 64, 1, 1, Activation::ReLU).unwrap();
        l2.weights_mut()[0] = 1.0; // filter 0 <- channel 0
        let mut l3 = ConvLayer::zeros(1, 32, 5, 5, Activation::Linear).unwrap();
        l3.weights_mut()[2 * 5 + 2] = 1.0; // channel 0, center of the 5x5
        SrcnnModel::from_layers(1, l1, l2, l3, ModelMetadata::default()).unwrap()
    }

    fn textured(h: usize, w: usize) -> RasterImage {
        let mut data = Vec::with_capacity(h * w);
        for y in 0..h {
            for x in 0..w {
                data.push((0.5 + 0.4 * ((x as f64) * 0.7).sin() * ((y as f64) * 0.5).cos()).clamp(0.0, 1.0));
            }
        }
        RasterImage::from_data(h, w, 1, data).unwrap()
    }

    #[test]
    fn reflect_indexing_mirrors_without_repeating_the_edge() {
        assert_eq!(reflect(-1, 5), 1);
        assert_eq!(reflect(-2, 5), 2);
        assert_eq!(reflect(0, 5), 0);
        assert_eq!(reflect(4, 5), 4);
        assert_eq!(reflect(5, 5), 3);
        assert_eq!(reflect(6, 5), 2);
        // Deep folds for tiny sizes: period 2n-2 = 2 when n = 2.
        assert_eq!(reflect(-6, 2), 0);
        assert_eq!(reflect(7, 2), 1);
        assert_eq!(reflect(3, 1), 0);
    }

    #[test]
    fn output_dimensions_are_exactly_scaled() {
        let model = identity_model();
        let img = textured(30, 21);
        let out = upscale(&model, &img, 2).unwrap();
        assert_eq!((out.height(), out.width()), (60, 42));
        let out = upscale(&model, &img, 3).unwrap();
        assert_eq!((out.height(), out.width()), (90, 63));
    }

    #[test]
    fn identity_model_reproduces_the_bicubic_upscale() {
        let model = identity_model();
        let img = textured(25, 25);
        let out = upscale(&model, &img, 2).unwrap();
        let want = bicubic_resize(&img, 50, 50).unwrap();
        for (a, b) in out.data().iter().zip(want.data()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn one_pixel_image_upscales_to_a_constant() {
        let model = identity_model();
        let img = RasterImage::filled(1, 1, 1, 0.6).unwrap();
        let out = upscale(&model, &img, 2).unwrap();
        assert_eq!((out.height(), out.width()), (2, 2));
        for v in out.data() {
            assert!((v - 0.6).abs() < 1e-9);
        }
    }

    #[test]
    fn channel_mismatch_is_rejected() {
        let model = identity_model();
        let rgb = RasterImage::filled(20, 20, 3, 0.5).unwrap();
        assert!(matches!(
            upscale(&model, &rgb, 2),
            Err(SrcnnError::ChannelMismatch(_))
        ));
    }

    #[test]
    fn bad_scales_are_rejected() {
        let model = identity_model();
        let img = textured(20, 20);
        assert!(upscale(&model, &img, 1).is_err());
        assert!(upscale(&model, &img, 4).is_err());
    }
}
