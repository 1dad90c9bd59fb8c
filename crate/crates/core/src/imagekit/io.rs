//! Loading and saving images.
//!
//! Supported on disk: PNG (8-bit grayscale or RGB) and binary PNM
//! (`P5` PGM / `P6` PPM). The loader sniffs magic bytes rather than
//! trusting file extensions; anything else is reported as an unsupported
//! format. The saver picks the container from the output extension.

use std::io::ErrorKind;
use std::path::Path;

use image::{ColorType, DynamicImage, ImageFormat, ImageReader};

use super::raster::{ImageError, RasterImage};

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

/// Loads an image from disk, sniffing the container from its magic bytes.
pub fn load_image(path: &Path) -> Result<RasterImage, ImageError> {
    let bytes = std::fs::read(path).map_err(|e| {
        if e.kind() == ErrorKind::NotFound {
            ImageError::FileNotFound(path.display().to_string())
        } else {
            ImageError::Io(e)
        }
    })?;

    if bytes.starts_with(&PNG_MAGIC) {
        return decode_png(&bytes);
    }
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        return decode_pnm(&bytes);
    }
    Err(ImageError::UnsupportedFormat(describe_magic(&bytes)))
}

/// Saves an image. The container is chosen by extension: `.png`, `.pgm`
/// (single channel), or `.ppm` (three channels).
pub fn save_image(img: &RasterImage, path: &Path) -> Result<(), ImageError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "png" => save_png(img, path),
        "pgm" => {
            if img.channels() != 1 {
                return Err(ImageError::UnsupportedFormat(
                    "PGM holds a single channel; convert to grayscale first".into(),
                ));
            }
            save_pnm(img, path, b"P5")
        }
        "ppm" => {
            if img.channels() != 3 {
                return Err(ImageError::UnsupportedFormat(
                    "PPM holds three channels".into(),
                ));
            }
            save_pnm(img, path, b"P6")
        }
        other => Err(ImageError::UnsupportedFormat(format!(
            "cannot infer output format from extension {other:?} (use .png, .pgm, or .ppm)"
        ))),
    }
}

fn decode_png(bytes: &[u8]) -> Result<RasterImage, ImageError> {
    let reader = ImageReader::with_format(std::io::Cursor::new(bytes), ImageFormat::Png);
    let decoded = reader
        .decode()
        .map_err(|e| ImageError::CorruptImage(format!("PNG decode failed: {e}")))?;
    match decoded {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = (buf.width() as usize, buf.height() as usize);
            let data = buf.into_raw().into_iter().map(|v| f64::from(v) / 255.0).collect();
            RasterImage::from_data(h, w, 1, data)
        }
        DynamicImage::ImageRgb8(buf) => {
            let (w, h) = (buf.width() as usize, buf.height() as usize);
            let data = buf.into_raw().into_iter().map(|v| f64::from(v) / 255.0).collect();
            RasterImage::from_data(h, w, 3, data)
        }
        other => Err(ImageError::UnsupportedFormat(format!(
            "PNG color type {:?} (only 8-bit grayscale and RGB are supported)",
            other.color()
        ))),
    }
}

fn save_png(img: &RasterImage, path: &Path) -> Result<(), ImageError> {
    let bytes = quantize(img);
    let color = if img.channels() == 1 { ColorType::L8 } else { ColorType::Rgb8 };
    image::save_buffer_with_format(
        path,
        &bytes,
        img.width() as u32,
        img.height() as u32,
        color,
        ImageFormat::Png,
    )
    .map_err(|e| match e {
        image::ImageError::IoError(io) => ImageError::Io(io),
        other => ImageError::CorruptImage(format!("PNG encode failed: {other}")),
    })
}

fn save_pnm(img: &RasterImage, path: &Path, magic: &[u8]) -> Result<(), ImageError> {
    let mut out = Vec::with_capacity(img.data().len() + 32);
    out.extend_from_slice(magic);
    out.extend_from_slice(format!("\n{} {}\n255\n", img.width(), img.height()).as_bytes());
    out.extend_from_slice(&quantize(img));
    std::fs::write(path, out)?;
    Ok(())
}

fn quantize(img: &RasterImage) -> Vec<u8> {
    img.data().iter().map(|v| (v * 255.0).round() as u8).collect()
}

fn decode_pnm(bytes: &[u8]) -> Result<RasterImage, ImageError> {
    let channels = if bytes.starts_with(b"P5") { 1 } else { 3 };
    let mut pos = 2;
    let width = read_pnm_int(bytes, &mut pos)?;
    let height = read_pnm_int(bytes, &mut pos)?;
    let maxval = read_pnm_int(bytes, &mut pos)?;
    if maxval == 0 || maxval > 255 {
        return Err(ImageError::UnsupportedFormat(format!(
            "PNM maxval {maxval} (only single-byte samples are supported)"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(ImageError::CorruptImage("PNM header not followed by whitespace".into())),
    }
    if height == 0 || width == 0 {
        return Err(ImageError::CorruptImage(format!("PNM declares {height}x{width} raster")));
    }
    let need = height
        .checked_mul(width)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| ImageError::CorruptImage("PNM dimensions overflow".into()))?;
    let raster = bytes
        .get(pos..pos + need)
        .ok_or_else(|| ImageError::CorruptImage(format!("PNM raster truncated: need {need} bytes")))?;
    let scale = 1.0 / maxval as f64;
    let data = raster.iter().map(|&v| f64::from(v.min(maxval as u8)) * scale).collect();
    RasterImage::from_data(height, width, channels, data)
}

/// Reads one ASCII unsigned integer, skipping whitespace and `#` comments.
fn read_pnm_int(bytes: &[u8], pos: &mut usize) -> Result<usize, ImageError> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(b) = bytes.get(*pos) {
                    *pos += 1;
                    if *b == b'\n' {
                        break;
                    }
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while matches!(bytes.get(*pos), Some(b) if b.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start {
        return Err(ImageError::CorruptImage("PNM header field is not a number".into()));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ImageError::CorruptImage("PNM header field out of range".into()))
}

fn describe_magic(bytes: &[u8]) -> String {
    let label = if bytes.starts_with(&[0xFF, 0xD8]) {
        "JPEG"
    } else if bytes.starts_with(b"GIF8") {
        "GIF"
    } else if bytes.starts_with(b"BM") {
        "BMP"
    } else if bytes.starts_with(b"II*\0") || bytes.starts_with(b"MM\0*") {
        "TIFF"
    } else if bytes.starts_with(b"RIFF") {
        "RIFF/WebP"
    } else {
        "unrecognized"
    };
    format!("{label} data (supported inputs: PNG, binary PGM/PPM)")
}
