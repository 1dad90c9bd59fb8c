//! Versioned binary serialization of trained forests.
//!
//! Layout (little-endian), checksummed with CRC32 over everything before
//! the trailer:
//!
//! ```text
//! magic "RFOR" | version u32 | kind u32 | n_trees u32 | seed u64
//! grid_h u32 | grid_w u32 | grayscale u8 | n_classes u32 | n_features u32
//! trees: pre-order nodes
//!   internal: tag 0u8, feature u32, threshold f64
//!   leaf:     tag 1u8, class u32, histogram u32[n_classes]
//! crc32 u32
//! ```

use std::path::Path;

use super::ensemble::RandomForest;
use super::features::FeatureConfig;
use super::impurity::ImpurityKind;
use super::tree::TreeNode;
use super::ForestError;

const MAGIC: &[u8; 4] = b"RFOR";
const VERSION: u32 = 1;
/// Decode guard against absurdly nested node records.
const MAX_TREE_DEPTH: usize = 65_536;

fn kind_code(kind: ImpurityKind) -> u32 {
    match kind {
        ImpurityKind::Gdi => 0,
        ImpurityKind::Tdc => 1,
        ImpurityKind::Tr => 2,
    }
}

fn kind_from_code(code: u32) -> Result<ImpurityKind, ForestError> {
    match code {
        0 => Ok(ImpurityKind::Gdi),
        1 => Ok(ImpurityKind::Tdc),
        2 => Ok(ImpurityKind::Tr),
        other => Err(ForestError::MalformedForest(format!(
            "unknown impurity code {other}"
        ))),
    }
}

/// Encodes a forest to its binary form.
pub fn forest_to_bytes(forest: &RandomForest) -> Result<Vec<u8>, ForestError> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&kind_code(forest.kind()).to_le_bytes());
    let n_trees = u32::try_from(forest.trees().len())
        .map_err(|_| ForestError::MalformedForest("too many trees for the format".into()))?;
    out.extend_from_slice(&n_trees.to_le_bytes());
    out.extend_from_slice(&forest.seed().to_le_bytes());
    let cfg = forest.feature_config();
    for dim in [cfg.grid_h(), cfg.grid_w()] {
        let dim = u32::try_from(dim)
            .map_err(|_| ForestError::MalformedForest("feature grid too large".into()))?;
        out.extend_from_slice(&dim.to_le_bytes());
    }
    out.push(u8::from(cfg.grayscale()));
    for count in [forest.n_classes(), forest.n_features()] {
        let count = u32::try_from(count)
            .map_err(|_| ForestError::MalformedForest("count field too large".into()))?;
        out.extend_from_slice(&count.to_le_bytes());
    }
    for tree in forest.trees() {
        encode_node(tree, forest.n_classes(), &mut out)?;
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

fn encode_node(node: &TreeNode, n_classes: usize, out: &mut Vec<u8>) -> Result<(), ForestError> {
    match node {
        TreeNode::Internal { feature, threshold, left, right } => {
            out.push(0);
            let feature = u32::try_from(*feature)
                .map_err(|_| ForestError::MalformedForest("feature index too large".into()))?;
            out.extend_from_slice(&feature.to_le_bytes());
            out.extend_from_slice(&threshold.to_le_bytes());
            encode_node(left, n_classes, out)?;
            encode_node(right, n_classes, out)
        }
        TreeNode::Leaf { class, histogram } => {
            out.push(1);
            if histogram.len() != n_classes {
                return Err(ForestError::MalformedForest(format!(
                    "leaf histogram has {} entries, forest has {} classes",
                    histogram.len(),
                    n_classes
                )));
            }
            let class = u32::try_from(*class)
                .map_err(|_| ForestError::MalformedForest("class index too large".into()))?;
            out.extend_from_slice(&class.to_le_bytes());
            for &count in histogram {
                let count = u32::try_from(count).map_err(|_| {
                    ForestError::MalformedForest("histogram count exceeds format range".into())
                })?;
                out.extend_from_slice(&count.to_le_bytes());
            }
            Ok(())
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ForestError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let slice = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(slice)
            }
            None => Err(ForestError::MalformedForest(format!(
                "truncated record at byte {}",
                self.pos
            ))),
        }
    }

    fn u8(&mut self) -> Result<u8, ForestError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, ForestError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ForestError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, ForestError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Decodes a forest, verifying magic, version, checksum, and structural
/// sanity (node tags, index ranges, exact length).
pub fn forest_from_bytes(bytes: &[u8]) -> Result<RandomForest, ForestError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(ForestError::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(ForestError::ChecksumMismatch);
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored_crc = u32::from_le_bytes(trailer.try_into().unwrap());
    if crc32fast::hash(body) != stored_crc {
        return Err(ForestError::ChecksumMismatch);
    }

    let mut cur = Cursor { bytes: body, pos: 4 };
    let version = cur.u32()?;
    if version != VERSION {
        return Err(ForestError::VersionUnsupported(version));
    }
    let kind = kind_from_code(cur.u32()?)?;
    let n_trees = cur.u32()? as usize;
    if n_trees == 0 {
        return Err(ForestError::MalformedForest("forest holds no trees".into()));
    }
    let seed = cur.u64()?;
    let grid_h = cur.u32()? as usize;
    let grid_w = cur.u32()? as usize;
    let grayscale = match cur.u8()? {
        0 => false,
        1 => true,
        other => {
            return Err(ForestError::MalformedForest(format!(
                "grayscale flag must be 0 or 1, found {other}"
            )))
        }
    };
    let feature_config = FeatureConfig::new(grid_h, grid_w, grayscale)
        .map_err(|_| ForestError::MalformedForest("empty feature grid".into()))?;
    let n_classes = cur.u32()? as usize;
    if n_classes < 2 {
        return Err(ForestError::MalformedForest(format!(
            "forest must distinguish at least 2 classes, found {n_classes}"
        )));
    }
    let n_features = cur.u32()? as usize;
    if n_features == 0 {
        return Err(ForestError::MalformedForest("forest has no features".into()));
    }

    let mut trees = Vec::with_capacity(n_trees.min(4096));
    for _ in 0..n_trees {
        trees.push(decode_node(&mut cur, n_classes, n_features, 0)?);
    }
    if cur.pos != body.len() {
        return Err(ForestError::MalformedForest(format!(
            "{} unexpected trailing byte(s)",
            body.len() - cur.pos
        )));
    }
    Ok(RandomForest::from_parts(trees, kind, seed, feature_config, n_classes, n_features))
}

fn decode_node(
    cur: &mut Cursor<'_>,
    n_classes: usize,
    n_features: usize,
    depth: usize,
) -> Result<TreeNode, ForestError> {
    if depth > MAX_TREE_DEPTH {
        return Err(ForestError::MalformedForest("tree nesting exceeds limit".into()));
    }
    match cur.u8()? {
        0 => {
            let feature = cur.u32()? as usize;
            if feature >= n_features {
                return Err(ForestError::MalformedForest(format!(
                    "feature index {feature} out of range 0..{n_features}"
                )));
            }
            let threshold = cur.f64()?;
            if !threshold.is_finite() {
                return Err(ForestError::MalformedForest(
                    "non-finite split threshold".into(),
                ));
            }
            let left = decode_node(cur, n_classes, n_features, depth + 1)?;
            let right = decode_node(cur, n_classes, n_features, depth + 1)?;
            Ok(TreeNode::Internal {
                feature,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            })
        }
        1 => {
            let class = cur.u32()? as usize;
            if class >= n_classes {
                return Err(ForestError::MalformedForest(format!(
                    "class index {class} out of range 0..{n_classes}"
                )));
            }
            let mut histogram = Vec::with_capacity(n_classes);
            for _ in 0..n_classes {
                histogram.push(u64::from(cur.u32()?));
            }
            Ok(TreeNode::Leaf { class, histogram })
        }
        other => Err(ForestError::MalformedForest(format!(
            "unknown node tag {other}"
        ))),
    }
}

/// Writes a forest to a file.
pub fn save_forest(forest: &RandomForest, path: &Path) -> Result<(), ForestError> {
    Ok(std::fs::write(path, forest_to_bytes(forest)?)?)
}

/// Reads a forest from a file.
pub fn load_forest(path: &Path) -> Result<RandomForest, ForestError> {
    forest_from_bytes(&std::fs::read(path)?)
}
