//! The in-memory image container and the error type shared by all image
//! operations.

use thiserror::Error;

/// Errors produced by image loading, saving, and geometry operations.
#[derive(Debug, Error)]
pub enum ImageError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image data: {0}")]
    CorruptImage(String),
    #[error("{0}")]
    InvalidDimensions(String),
    #[error("image too small: {0}")]
    ImageTooSmall(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A dense raster image: `height x width x channels` samples in `[0, 1]`,
/// stored row-major with interleaved channels.
///
/// `channels` is 1 (grayscale) or 3 (RGB); both dimensions are at least 1.
/// Constructors enforce these invariants, and every mutation path clamps
/// sample values into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl RasterImage {
    /// Creates an image filled with a constant value (clamped to `[0, 1]`).
    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Result<Self, ImageError> {
        Self::check_shape(height, width, channels)?;
        Ok(Self {
            height,
            width,
            channels,
            data: vec![value.clamp(0.0, 1.0); height * width * channels],
        })
    }

    /// Wraps an existing sample buffer. The buffer length must equal
    /// `height * width * channels`; values are clamped into `[0, 1]`.
    pub fn from_data(height: usize, width: usize, channels: usize, mut data: Vec<f64>) -> Result<Self, ImageError> {
        Self::check_shape(height, width, channels)?;
        if data.len() != height * width * channels {
            return Err(ImageError::ShapeMismatch(format!(
                "buffer holds {} samples, expected {}x{}x{} = {}",
                data.len(),
                height,
                width,
                channels,
                height * width * channels
            )));
        }
        for v in &mut data {
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self { height, width, channels, data })
    }

    fn check_shape(height: usize, width: usize, channels: usize) -> Result<(), ImageError> {
        if height == 0 || width == 0 {
            return Err(ImageError::InvalidDimensions(format!(
                "image dimensions must be at least 1x1, got {height}x{width}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(ImageError::InvalidDimensions(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        Ok(())
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// The raw sample buffer, row-major with interleaved channels.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Sample at `(y, x, c)`. Panics when out of bounds.
    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        debug_assert!(y < self.height && x < self.width && c < self.channels);
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Writes the sample at `(y, x, c)`, clamping into `[0, 1]`.
    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, value: f64) {
        debug_assert!(y < self.height && x < self.width && c < self.channels);
        self.data[(y * self.width + x) * self.channels + c] = value.clamp(0.0, 1.0);
    }

    /// Converts to single-channel luma using BT.601 weights
    /// (0.299 R + 0.587 G + 0.114 B). Grayscale input is returned
    /// unchanged.
    pub fn to_grayscale(&self) -> RasterImage {
        if self.channels == 1 {
            return self.clone();
        }
        let mut data = Vec::with_capacity(self.height * self.width);
        for px in self.data.chunks_exact(3) {
            let y = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
            data.push(y.clamp(0.0, 1.0));
        }
        RasterImage {
            height: self.height,
            width: self.width,
            channels: 1,
            data,
        }
    }

    /// Extracts the axis-aligned crop of size `h x w` whose top-left corner
    /// is at `(top, left)`.
    pub fn crop(&self, top: usize, left: usize, h: usize, w: usize) -> Result<RasterImage, ImageError> {
        if h == 0 || w == 0 || top + h > self.height || left + w > self.width {
            return Err(ImageError::InvalidDimensions(format!(
                "crop {h}x{w} at ({top}, {left}) exceeds image {}x{}",
                self.height, self.width
            )));
        }
        let mut data = Vec::with_capacity(h * w * self.channels);
        for y in top..top + h {
            let start = (y * self.width + left) * self.channels;
            data.extend_from_slice(&self.data[start..start + w * self.channels]);
        }
        Ok(RasterImage {
            height: h,
            width: w,
            channels: self.channels,
            data,
        })
    }

    /// Internal constructor for pipelines that have already produced
    /// clamped data of the right length.
    pub(crate) fn from_clamped(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), height * width * channels);
        debug_assert!(data.iter().all(|v| (0.0..=1.0).contains(v)));
        Self { height, width, channels, data }
    }
}
