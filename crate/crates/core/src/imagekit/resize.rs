//! Bicubic resampling with the Catmull-Rom kernel.
//!
//! Coordinates map with half-pixel centers, `src = (dst + 0.5) * in/out - 0.5`,
//! which keeps the image centered for any scale factor. Border taps replicate
//! the edge sample. The two passes (horizontal, then vertical) run on
//! unclamped intermediates; only the final output is clamped to `[0, 1]`.

use super::raster::{ImageError, RasterImage};

/// Catmull-Rom cubic kernel (the `a = -0.5` member of the Keys family).
/// Zero outside `|x| < 2`; reproduces constant and linear signals exactly.
#[inline]
fn catmull_rom(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        (1.5 * x - 2.5) * x * x + 1.0
    } else if x < 2.0 {
        ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0
    } else {
        0.0
    }
}

/// Tap indices (edge-replicated) and weights for one resampled axis.
struct AxisPlan {
    /// Per output position: four clamped source indices.
    taps: Vec<[usize; 4]>,
    /// Per output position: the matching kernel weights.
    weights: Vec<[f64; 4]>,
}

fn plan_axis(in_size: usize, out_size: usize) -> AxisPlan {
    let ratio = in_size as f64 / out_size as f64;
    let mut taps = Vec::with_capacity(out_size);
    let mut weights = Vec::with_capacity(out_size);
    for d in 0..out_size {
        let src = (d as f64 + 0.5) * ratio - 0.5;
        let base = src.floor();
        let frac = src - base;
        let base = base as i64;
        let mut t = [0usize; 4];
        let mut w = [0f64; 4];
        for (k, (ti, wi)) in t.iter_mut().zip(w.iter_mut()).enumerate() {
            let idx = base - 1 + k as i64;
            *ti = idx.clamp(0, in_size as i64 - 1) as usize;
            *wi = catmull_rom(frac - (k as f64 - 1.0));
        }
        taps.push(t);
        weights.push(w);
    }
    AxisPlan { taps, weights }
}

/// Resizes an image to `out_h x out_w` with bicubic interpolation.
///
/// Resizing to the input size returns a numerically exact copy (the kernel
/// weights collapse to `[0, 1, 0, 0]` at integer sample positions).
pub fn bicubic_resize(img: &RasterImage, out_h: usize, out_w: usize) -> Result<RasterImage, ImageError> {
    if out_h == 0 || out_w == 0 {
        return Err(ImageError::InvalidDimensions(format!(
            "target dimensions must be at least 1x1, got {out_h}x{out_w}"
        )));
    }
    let (in_h, in_w, channels) = (img.height(), img.width(), img.channels());
    let xplan = plan_axis(in_w, out_w);
    let yplan = plan_axis(in_h, out_h);

    let mut out = vec![0f64; out_h * out_w * channels];
    let mut plane = vec![0f64; in_h * in_w];
    let mut mid = vec![0f64; in_h * out_w];
    for c in 0..channels {
        // Deinterleave one channel so both passes run on contiguous rows.
        let src = img.data();
        for (i, v) in plane.iter_mut().enumerate() {
            *v = src[i * channels + c];
        }
        // Horizontal pass: in_h x in_w -> in_h x out_w.
        for y in 0..in_h {
            let row = &plane[y * in_w..(y + 1) * in_w];
            let dst = &mut mid[y * out_w..(y + 1) * out_w];
            for (x, d) in dst.iter_mut().enumerate() {
                let t = &xplan.taps[x];
                let w = &xplan.weights[x];
                *d = w[0] * row[t[0]] + w[1] * row[t[1]] + w[2] * row[t[2]] + w[3] * row[t[3]];
            }
        }
        // Vertical pass: in_h x out_w -> out_h x out_w, clamping on write-out.
        for y in 0..out_h {
            let t = &yplan.taps[y];
            let w = &yplan.weights[y];
            let (r0, r1, r2, r3) = (
                &mid[t[0] * out_w..t[0] * out_w + out_w],
                &mid[t[1] * out_w..t[1] * out_w + out_w],
                &mid[t[2] * out_w..t[2] * out_w + out_w],
                &mid[t[3] * out_w..t[3] * out_w + out_w],
            );
            for x in 0..out_w {
                let v = w[0] * r0[x] + w[1] * r1[x] + w[2] * r2[x] + w[3] * r3[x];
                out[(y * out_w + x) * channels + c] = v.clamp(0.0, 1.0);
            }
        }
    }
    Ok(RasterImage::from_clamped(out_h, out_w, channels, out))
}
