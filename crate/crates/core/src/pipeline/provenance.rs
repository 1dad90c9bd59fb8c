//! Provenance records: every command that produces artifacts drops a
//! `provenance.json` beside them describing the seed, the effective
//! configuration, and a content hash of each input file.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::PipelineError;

/// One input file referenced by a provenance record.
#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

/// Lowercase hex SHA-256 of a byte slice.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write;
        write!(out, "{b:02x}").expect("writing to a String cannot fail");
    }
    out
}

/// Lowercase hex SHA-256 of a file's contents.
pub fn sha256_file(path: &Path) -> Result<String, PipelineError> {
    Ok(sha256_hex(&fs::read(path)?))
}

#[derive(Serialize)]
struct ProvenanceDocument<'a> {
    seed: u64,
    config: &'a serde_json::Value,
    inputs: &'a [InputRecord],
}

/// Writes `dir/provenance.json` (pretty-printed, trailing newline).
pub fn write_provenance(
    dir: &Path,
    seed: u64,
    config: &serde_json::Value,
    inputs: &[InputRecord],
) -> Result<(), PipelineError> {
    let doc = ProvenanceDocument { seed, config, inputs };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::create_dir_all(dir)?;
    fs::write(dir.join("provenance.json"), text)?;
    Ok(())
}
