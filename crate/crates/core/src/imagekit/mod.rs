//! Image containers, file I/O, resampling, patch extraction, geometric
//! augmentation, and quality metrics.
//!
//! All pixel data lives in `f64` in the range `[0, 1]`, interleaved
//! row-major (`y`, then `x`, then channel). Operations that can produce
//! out-of-range values clamp back into `[0, 1]` before returning.

mod augment;
mod io;
mod metrics;
mod patch;
mod raster;
mod resize;

pub use augment::{augment, AugmentParams};
pub use io::{load_image, save_image};
pub use metrics::psnr;
pub use patch::{extract_patch_pairs, PatchPair, INPUT_PATCH, PATCH_STRIDE, TARGET_OFFSET, TARGET_PATCH};
pub use raster::{ImageError, RasterImage};
pub use resize::bicubic_resize;
