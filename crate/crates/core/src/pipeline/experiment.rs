//! Full experiment orchestration: split the manifest, train one
//! super-resolution model per magnified scale, score every
//! (impurity, trees, scale, eye) cell, and persist results, table, ledger,
//! models, and provenance under one output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::forest::ImpurityKind;
use crate::imagekit::{load_image, RasterImage};
use crate::rng::derive_seed_str;
use crate::srcnn::{model_to_bytes, save_model, SrcnnModel, TrainConfig};

use super::classify::{fit_and_score, prepare_eye_data};
use super::manifest::{load_manifest, Eye};
use super::provenance::{sha256_file, sha256_hex, write_provenance, InputRecord};
use super::results::{
    emit_results_table, write_results_csv, CellResult, ResultsTable, TABLE_SCALES,
    TABLE_TREE_COUNTS,
};
use super::splitting::{split_person_disjoint, SplitRatios};
use super::srtrain::{run_sr_training, DEFAULT_PATCH_BUDGET};
use super::PipelineError;

/// Knobs for [`run_full_experiment`]. `Default` covers the whole reference
/// matrix; narrow the axes for partial runs.
#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub seed: u64,
    pub kinds: Vec<ImpurityKind>,
    pub tree_counts: Vec<usize>,
    pub scales: Vec<usize>,
    pub patch_budget: usize,
    /// Overrides the epoch count of the internal SR training runs; `None`
    /// keeps the reference schedule.
    pub sr_epochs: Option<usize>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            kinds: ImpurityKind::ALL.to_vec(),
            tree_counts: TABLE_TREE_COUNTS.to_vec(),
            scales: TABLE_SCALES.to_vec(),
            patch_budget: DEFAULT_PATCH_BUDGET,
            sr_epochs: None,
        }
    }
}

impl ExperimentOptions {
    pub fn new(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Everything a finished experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub cells: Vec<CellResult>,
    /// Assembled only when the run covers the full reference matrix.
    pub table: Option<ResultsTable>,
    pub results_csv: PathBuf,
    pub table_path: Option<PathBuf>,
    pub ledger_csv: PathBuf,
    pub model_paths: Vec<PathBuf>,
}

fn canonical_axes(
    options: &ExperimentOptions,
) -> Result<(Vec<ImpurityKind>, Vec<usize>, Vec<usize>), PipelineError> {
    if options.kinds.is_empty() || options.tree_counts.is_empty() || options.scales.is_empty() {
        return Err(PipelineError::BadParameter(
            "kinds, tree counts, and scales must each list at least one value".into(),
        ));
    }
    for &kind in &options.kinds {
        if options.kinds.iter().filter(|&&k| k == kind).count() > 1 {
            return Err(PipelineError::BadParameter(format!(
                "impurity kind {} is listed twice",
                kind.tag()
            )));
        }
    }
    let kinds: Vec<ImpurityKind> =
        ImpurityKind::ALL.into_iter().filter(|k| options.kinds.contains(k)).collect();

    let mut tree_counts = options.tree_counts.clone();
    tree_counts.sort_unstable();
    if tree_counts[0] == 0 {
        return Err(PipelineError::BadParameter("tree counts must be at least 1".into()));
    }
    if tree_counts.windows(2).any(|w| w[0] == w[1]) {
        return Err(PipelineError::BadParameter("tree counts must be distinct".into()));
    }

    let mut scales = options.scales.clone();
    scales.sort_unstable();
    if scales.windows(2).any(|w| w[0] == w[1]) {
        return Err(PipelineError::BadParameter("scales must be distinct".into()));
    }
    for &scale in &scales {
        if !(1..=3).contains(&scale) {
            return Err(PipelineError::BadParameter(format!(
                "scale must be 1, 2, or 3, got {scale}"
            )));
        }
    }
    if options.patch_budget == 0 {
        return Err(PipelineError::BadParameter("patch budget must be at least 1".into()));
    }
    Ok((kinds, tree_counts, scales))
}

fn write_flat_results_csv(path: &Path, cells: &[CellResult]) -> Result<(), PipelineError> {
    let mut text = String::from("kind,trees,scale,eye,accuracy_pct\n");
    for cell in cells {
        text.push_str(&format!(
            "{},{},{},{},{:.2}\n",
            cell.kind.tag(),
            cell.trees,
            cell.scale,
            cell.eye,
            cell.accuracy_pct
        ));
    }
    fs::write(path, text)?;
    Ok(())
}

/// Runs the classification experiment matrix described by `options` on the
/// manifest at `manifest_path`, writing all artifacts under `out_dir`:
/// `results.csv`, `ledger.csv`, `provenance.json`, `models/sr{S}x.srcn` for
/// each magnified scale, and `table.txt` when the run covers the full
/// reference matrix.
pub fn run_full_experiment(
    manifest_path: &Path,
    out_dir: &Path,
    options: &ExperimentOptions,
) -> Result<ExperimentSummary, PipelineError> {
    let (kinds, tree_counts, scales) = canonical_axes(options)?;
    let seed = options.seed;

    let entries = load_manifest(manifest_path)?;
    let split = split_person_disjoint(&entries, SplitRatios::default(), seed)?;
    fs::create_dir_all(out_dir)?;

    // One SR model per magnified scale, trained on the unaugmented train
    // partition and persisted beside the results.
    let mut models: BTreeMap<usize, (SrcnnModel, String)> = BTreeMap::new();
    let mut model_paths = Vec::new();
    if scales.iter().any(|&s| s > 1) {
        let train_images: Vec<RasterImage> = split
            .train
            .iter()
            .map(|e| load_image(&e.image_path))
            .collect::<Result<_, _>>()?;
        let models_dir = out_dir.join("models");
        fs::create_dir_all(&models_dir)?;
        for &scale in scales.iter().filter(|&&s| s > 1) {
            eprintln!("training {scale}x super-resolution model...");
            let mut config = TrainConfig::reference(derive_seed_str(seed, &format!("sr/{scale}")));
            if let Some(epochs) = options.sr_epochs {
                config.epochs = epochs;
            }
            let report = run_sr_training(&train_images, scale, &config, options.patch_budget)?;
            let path = models_dir.join(format!("sr{scale}x.srcn"));
            save_model(&report.model, &path)?;
            let hash = sha256_hex(&model_to_bytes(&report.model));
            models.insert(scale, (report.model, hash));
            model_paths.push(path);
        }
    }

    // Score the matrix: feature extraction is shared across every
    // (kind, trees) cell of one (scale, eye) pane.
    let cfg = crate::forest::FeatureConfig::default();
    let mut cells = Vec::new();
    let mut ledger = String::from("kind,trees,scale,eye,accuracy_pct,forest_seed,sr_model_sha256\n");
    for &scale in &scales {
        for eye in Eye::BOTH {
            eprintln!("scoring scale {scale}x, eye {eye}...");
            let sr_model = models.get(&scale).map(|(m, _)| m);
            let eye_data = prepare_eye_data(&split, scale, sr_model, seed, eye, &cfg)?;
            let forest_seed = derive_seed_str(seed, &format!("forest/{eye}"));
            for &kind in &kinds {
                for &trees in &tree_counts {
                    let accuracy_pct = fit_and_score(&eye_data, kind, trees, forest_seed)?;
                    cells.push(CellResult { kind, trees, scale, eye, accuracy_pct });
                }
            }
        }
    }

    // Canonical order: kind (reference order), trees, scale, then eye.
    cells.sort_by_key(|c| {
        (
            ImpurityKind::ALL.iter().position(|&k| k == c.kind),
            c.trees,
            c.scale,
            c.eye == Eye::Right,
        )
    });
    for cell in &cells {
        let forest_seed = derive_seed_str(seed, &format!("forest/{}", cell.eye));
        let sr_hash = models.get(&cell.scale).map_or("-", |(_, h)| h.as_str());
        ledger.push_str(&format!(
            "{},{},{},{},{:.2},{},{}\n",
            cell.kind.tag(),
            cell.trees,
            cell.scale,
            cell.eye,
            cell.accuracy_pct,
            forest_seed,
            sr_hash
        ));
    }

    let results_csv = out_dir.join("results.csv");
    let ledger_csv = out_dir.join("ledger.csv");
    fs::write(&ledger_csv, ledger)?;

    let full_matrix = kinds.len() == ImpurityKind::ALL.len()
        && tree_counts == TABLE_TREE_COUNTS
        && scales == TABLE_SCALES;
    let (table, table_path) = if full_matrix {
        let table = emit_results_table(&cells)?;
        write_results_csv(&results_csv, &table)?;
        let path = out_dir.join("table.txt");
        fs::write(&path, table.to_aligned_text())?;
        (Some(table), Some(path))
    } else {
        write_flat_results_csv(&results_csv, &cells)?;
        (None, None)
    };

    let config = serde_json::json!({
        "kinds": kinds.iter().map(|k| k.tag()).collect::<Vec<_>>(),
        "trees": tree_counts,
        "scales": scales,
        "patch_budget": options.patch_budget,
        "sr_epochs": options.sr_epochs,
        "split_ratios": [0.8, 0.1, 0.1],
        "augment_factor": super::classify::TRAIN_AUGMENT_FACTOR,
    });
    let inputs = vec![InputRecord {
        path: manifest_path.display().to_string(),
        sha256: sha256_file(manifest_path)?,
    }];
    write_provenance(out_dir, seed, &config, &inputs)?;

    Ok(ExperimentSummary { cells, table, results_csv, table_path, ledger_csv, model_paths })
}
