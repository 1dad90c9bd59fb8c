//! Dataset manifests: one CSV row per image with identity and labels.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::PipelineError;

/// Expected manifest CSV header, in column order.
pub const MANIFEST_HEADER: [&str; 5] = ["image_path", "subject_id", "sex", "eye", "source"];

/// Sex label of a subject; the classification target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sex {
    Female,
    Male,
}

impl Sex {
    /// The single-letter manifest encoding.
    pub fn letter(self) -> char {
        match self {
            Sex::Female => 'F',
            Sex::Male => 'M',
        }
    }

    /// Class index used by the forest (Female 0, Male 1).
    pub fn class_index(self) -> usize {
        match self {
            Sex::Female => 0,
            Sex::Male => 1,
        }
    }

    fn parse(value: &str) -> Option<Self> {
        match value {
            "F" => Some(Sex::Female),
            "M" => Some(Sex::Male),
            _ => None,
        }
    }
}

/// Which eye an image crops around; experiments report the two separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Eye {
    Left,
    Right,
}

impl Eye {
    /// The single-letter manifest encoding.
    pub fn letter(self) -> char {
        match self {
            Eye::Left => 'L',
            Eye::Right => 'R',
        }
    }

    pub const BOTH: [Eye; 2] = [Eye::Left, Eye::Right];

    fn parse(value: &str) -> Option<Self> {
        match value {
            "L" => Some(Eye::Left),
            "R" => Some(Eye::Right),
            _ => None,
        }
    }
}

impl std::fmt::Display for Eye {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One manifest row: an image plus its subject identity and labels. The
/// path is resolved against the manifest's directory at load time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub image_path: PathBuf,
    pub subject_id: String,
    pub sex: Sex,
    pub eye: Eye,
    pub source: String,
}

/// Loads and validates a manifest CSV.
///
/// The header must match [`MANIFEST_HEADER`] exactly. Every row must name a
/// distinct, existing image file (relative paths resolve against the
/// manifest's directory), a non-empty subject id, sex `F`/`M`, and eye
/// `L`/`R`.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, PipelineError> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => PipelineError::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("cannot open manifest {}: {e}", path.display()),
            )),
            _ => PipelineError::ParseError { line: 1, msg: e.to_string() },
        })?;

    let headers = reader
        .headers()
        .map_err(|e| PipelineError::ParseError { line: 1, msg: e.to_string() })?;
    if headers != MANIFEST_HEADER.as_slice() {
        return Err(PipelineError::ParseError {
            line: 1,
            msg: format!(
                "header must be {:?}, found {:?}",
                MANIFEST_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut entries = Vec::new();
    let mut seen_paths: HashSet<String> = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| PipelineError::ParseError {
            line: e.position().map_or(0, csv::Position::line),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, csv::Position::line);
        if record.len() != MANIFEST_HEADER.len() {
            return Err(PipelineError::ParseError {
                line,
                msg: format!("expected {} fields, found {}", MANIFEST_HEADER.len(), record.len()),
            });
        }

        let raw_path = record[0].trim();
        if raw_path.is_empty() {
            return Err(PipelineError::ParseError { line, msg: "empty image_path".into() });
        }
        if !seen_paths.insert(raw_path.to_string()) {
            return Err(PipelineError::DuplicatePath(raw_path.to_string()));
        }
        let image_path = {
            let p = Path::new(raw_path);
            if p.is_absolute() { p.to_path_buf() } else { base.join(p) }
        };
        if !image_path.is_file() {
            return Err(PipelineError::ParseError {
                line,
                msg: format!("image file not found: {}", image_path.display()),
            });
        }

        let subject_id = record[1].trim().to_string();
        if subject_id.is_empty() {
            return Err(PipelineError::ParseError { line, msg: "empty subject_id".into() });
        }
        let sex = Sex::parse(record[2].trim()).ok_or_else(|| PipelineError::UnknownLabel {
            line,
            value: record[2].to_string(),
        })?;
        let eye = Eye::parse(record[3].trim()).ok_or_else(|| PipelineError::UnknownLabel {
            line,
            value: record[3].to_string(),
        })?;
        let source = record[4].trim().to_string();

        entries.push(ManifestEntry { image_path, subject_id, sex, eye, source });
    }
    Ok(entries)
}
