//! Model serialization.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! magic   b"SRCN"
//! version u32 = 1
//! channels u32
//! 3 x layer:
//!     out u32, in u32, kh u32, kw u32
//!     weights f32[out*in*kh*kw]
//!     biases  f32[out]
//! metadata: seed u64, epochs u32, final_loss f32
//! crc32   u32 over every preceding byte
//! ```
//!
//! Weights are stored in single precision; loading widens back to `f64`,
//! so load-save-load round-trips are bit-stable.

use std::path::Path;

use super::layer::{Activation, ConvLayer};
use super::model::{ModelMetadata, SrcnnModel, LAYER1_FILTERS, LAYER1_KERNEL, LAYER2_FILTERS, LAYER2_KERNEL, LAYER3_KERNEL};
use super::SrcnnError;

const MAGIC: &[u8; 4] = b"SRCN";
const VERSION: u32 = 1;

/// Serializes a model to its binary representation.
pub fn model_to_bytes(model: &SrcnnModel) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(model.channels() as u32).to_le_bytes());
    for layer in model.layers() {
        buf.extend_from_slice(&(layer.out_channels() as u32).to_le_bytes());
        buf.extend_from_slice(&(layer.in_channels() as u32).to_le_bytes());
        buf.extend_from_slice(&(layer.kernel_h() as u32).to_le_bytes());
        buf.extend_from_slice(&(layer.kernel_w() as u32).to_le_bytes());
        for &w in layer.weights() {
            buf.extend_from_slice(&(w as f32).to_le_bytes());
        }
        for &b in layer.biases() {
            buf.extend_from_slice(&(b as f32).to_le_bytes());
        }
    }
    let meta = model.metadata();
    buf.extend_from_slice(&meta.seed.to_le_bytes());
    buf.extend_from_slice(&meta.epochs.to_le_bytes());
    buf.extend_from_slice(&meta.final_loss.to_le_bytes());
    let mut hasher = crc32fast::Hasher::new();
    hasher.update(&buf);
    buf.extend_from_slice(&hasher.finalize().to_le_bytes());
    buf
}

pub fn save_model(model: &SrcnnModel, path: &Path) -> Result<(), SrcnnError> {
    std::fs::write(path, model_to_bytes(model))?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SrcnnError> {
        let s = self
            .bytes
            .get(self.pos..self.pos + n)
            .ok_or_else(|| SrcnnError::MalformedModel("record overruns the file body".into()))?;
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, SrcnnError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, SrcnnError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32, SrcnnError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32_vec(&mut self, n: usize) -> Result<Vec<f64>, SrcnnError> {
        let raw = self.take(n * 4)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
            .collect())
    }
}

/// Deserializes a model, verifying magic, version, checksum, and the fixed
/// three-layer architecture.
pub fn model_from_bytes(bytes: &[u8]) -> Result<SrcnnModel, SrcnnError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(SrcnnError::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(SrcnnError::ChecksumMismatch);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(SrcnnError::VersionUnsupported(version));
    }
    if bytes.len() < 12 {
        return Err(SrcnnError::ChecksumMismatch);
    }
    let body = &bytes[..bytes.len() - 4];
    let stored = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    let mut hasher = crc32fast::Hasher::new();
    hasher.update(body);
    if hasher.finalize() != stored {
        return Err(SrcnnError::ChecksumMismatch);
    }

    let mut cur = Cursor { bytes: body, pos: 8 };
    let channels = cur.u32()? as usize;
    if channels != 1 && channels != 3 {
        return Err(SrcnnError::MalformedModel(format!("channel count {channels}")));
    }
    let expected = [
        (LAYER1_FILTERS, channels, LAYER1_KERNEL, Activation::ReLU),
        (LAYER2_FILTERS, LAYER1_FILTERS, LAYER2_KERNEL, Activation::ReLU),
        (channels, LAYER2_FILTERS, LAYER3_KERNEL, Activation::Linear),
    ];
    let mut layers = Vec::with_capacity(3);
    for (idx, (out_c, in_c, k, act)) in expected.into_iter().enumerate() {
        let (o, i, kh, kw) = (cur.u32()? as usize, cur.u32()? as usize, cur.u32()? as usize, cur.u32()? as usize);
        if (o, i, kh, kw) != (out_c, in_c, k, k) {
            return Err(SrcnnError::MalformedModel(format!(
                "layer {} geometry {o}x{i}x{kh}x{kw}, expected {out_c}x{in_c}x{k}x{k}",
                idx + 1
            )));
        }
        let weights = cur.f32_vec(o * i * kh * kw)?;
        let biases = cur.f32_vec(o)?;
        layers.push(ConvLayer::new(o, i, kh, kw, weights, biases, act).map_err(|e| {
            SrcnnError::MalformedModel(e.to_string())
        })?);
    }
    let metadata = ModelMetadata {
        seed: cur.u64()?,
        epochs: cur.u32()?,
        final_loss: cur.f32()?,
    };
    if cur.pos != body.len() {
        return Err(SrcnnError::MalformedModel(format!(
            "{} trailing bytes after the metadata block",
            body.len() - cur.pos
        )));
    }
    let mut it = layers.into_iter();
    let (l1, l2, l3) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
    SrcnnModel::from_layers(channels, l1, l2, l3, metadata)
        .map_err(|e| SrcnnError::MalformedModel(e.to_string()))
}

pub fn load_model(path: &Path) -> Result<SrcnnModel, SrcnnError> {
    let bytes = std::fs::read(path)?;
    model_from_bytes(&bytes)
}
