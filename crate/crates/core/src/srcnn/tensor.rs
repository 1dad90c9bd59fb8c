//! Dense rank-3 tensors in channel-major (CHW) layout.

use crate::imagekit::RasterImage;

use super::SrcnnError;

/// A `channels x height x width` tensor of `f64`, channel-major, each
/// channel plane row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    pub fn from_data(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self, SrcnnError> {
        if data.len() != channels * height * width {
            return Err(SrcnnError::ShapeMismatch(format!(
                "buffer holds {} values, expected {channels}x{height}x{width} = {}",
                data.len(),
                channels * height * width
            )));
        }
        Ok(Self { channels, height, width, data })
    }

    /// Converts an image (interleaved HWC) into a planar tensor.
    pub fn from_image(img: &RasterImage) -> Self {
        let (h, w, c) = (img.height(), img.width(), img.channels());
        let src = img.data();
        let mut data = vec![0.0; c * h * w];
        for ch in 0..c {
            let plane = &mut data[ch * h * w..(ch + 1) * h * w];
            for (i, v) in plane.iter_mut().enumerate() {
                *v = src[i * c + ch];
            }
        }
        Self { channels: c, height: h, width: w, data }
    }

    /// Converts back to an image, clamping into `[0, 1]`.
    pub fn to_image(&self) -> Result<RasterImage, SrcnnError> {
        let (c, h, w) = (self.channels, self.height, self.width);
        let mut out = vec![0.0; h * w * c];
        for ch in 0..c {
            let plane = &self.data[ch * h * w..(ch + 1) * h * w];
            for (i, v) in plane.iter().enumerate() {
                out[i * c + ch] = v.clamp(0.0, 1.0);
            }
        }
        RasterImage::from_data(h, w, c, out).map_err(|e| SrcnnError::ShapeMismatch(e.to_string()))
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        debug_assert!(c < self.channels && y < self.height && x < self.width);
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f64) {
        debug_assert!(c < self.channels && y < self.height && x < self.width);
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    /// One channel plane as a contiguous row-major slice.
    #[inline]
    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    /// Reshapes in place to the given dimensions, reusing the allocation
    /// and zero-filling. Used by buffer-reusing training internals.
    pub(crate) fn reset(&mut self, channels: usize, height: usize, width: usize) {
        let n = channels * height * width;
        self.data.clear();
        self.data.resize(n, 0.0);
        self.channels = channels;
        self.height = height;
        self.width = width;
    }
}
