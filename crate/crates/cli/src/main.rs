//! Command-line front door: every pipeline stage as a reproducible,
//! scriptable command. Machine-readable output (artifact paths) goes to
//! stdout; progress and human-oriented rendering go to stderr. Exit codes:
//! 0 success, 1 runtime or data error, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use perisr::forest::ImpurityKind;
use perisr::imagekit::{extract_patch_pairs, load_image, save_image, PatchPair, PATCH_STRIDE};
use perisr::pipeline::{
    generate_synthetic_corpus, grid_search_limited, load_manifest, run_full_experiment,
    run_sr_training, sha256_file, split_person_disjoint, subsample_plan, write_grid_ledger,
    write_provenance, ExperimentOptions, GridSpec, InputRecord, SplitRatios,
    DEFAULT_PATCH_BUDGET,
};
use perisr::rng::derive_seed_str;
use perisr::srcnn::{load_model, save_model, upscale, TrainConfig};

#[derive(Parser)]
#[command(name = "perisr", version, about = "Periocular super-resolution and sex classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_kind(s: &str) -> Result<ImpurityKind, String> {
    ImpurityKind::from_tag(s).ok_or_else(|| format!("unknown impurity kind '{s}' (expected gdi, tdc, or tr)"))
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic synthetic two-class corpus plus manifest.
    Synth {
        /// Number of subjects (even, at least 4).
        #[arg(long)]
        subjects: usize,
        /// Images per subject.
        #[arg(long = "per-subject")]
        per_subject: usize,
        #[arg(long)]
        seed: u64,
        /// Output directory for images and manifest.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a super-resolution model on a manifest's train partition.
    TrainSr {
        #[arg(long)]
        manifest: PathBuf,
        /// Magnification factor the model learns to undo.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=3))]
        scale: u64,
        #[arg(long)]
        seed: u64,
        /// Mini-batch size.
        #[arg(long, default_value_t = 16)]
        batch: usize,
        /// Training epochs.
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        /// SGD learning rate.
        #[arg(long, default_value_t = 1e-5)]
        lr: f64,
        /// SGD momentum coefficient.
        #[arg(long, default_value_t = 0.9)]
        momentum: f64,
        /// Cap on training patch pairs.
        #[arg(long = "patch-budget", default_value_t = DEFAULT_PATCH_BUDGET)]
        patch_budget: usize,
        /// Output model file; the loss history lands beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Upscale one image with a trained model.
    Upscale {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=3))]
        scale: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the sex-classification experiment matrix.
    Experiment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Magnification scales to evaluate.
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3], value_parser = clap::value_parser!(u64).range(1..=3))]
        scales: Vec<u64>,
        /// Impurity criteria to evaluate.
        #[arg(long, value_delimiter = ',', default_values = ["gdi", "tdc", "tr"], value_parser = parse_kind)]
        kinds: Vec<ImpurityKind>,
        /// Forest sizes to evaluate.
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 300, 500, 1000], value_parser = clap::value_parser!(usize))]
        trees: Vec<usize>,
        /// Cap on SR training patch pairs.
        #[arg(long = "patch-budget", default_value_t = DEFAULT_PATCH_BUDGET)]
        patch_budget: usize,
        /// Worker threads (default: number of processors).
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory for results, table, ledger, and models.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score the hyper-parameter grid by validation MSE.
    GridSearch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Evaluate only the first N cells (0 = whole grid).
        #[arg(long, default_value_t = 0)]
        limit: usize,
        /// Cap on patch pairs per partition.
        #[arg(long = "patch-budget", default_value_t = DEFAULT_PATCH_BUDGET)]
        patch_budget: usize,
        /// Output ledger CSV; the best config JSON lands beside it.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Directory that receives `provenance.json` for an output file path.
fn artifact_dir(out: &Path) -> PathBuf {
    match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn input_record(path: &Path) -> anyhow::Result<InputRecord> {
    Ok(InputRecord {
        path: path.display().to_string(),
        sha256: sha256_file(path).with_context(|| format!("hashing {}", path.display()))?,
    })
}

/// Extracts the full patch grid of every image, then applies a seeded
/// uniform subsample if the total exceeds `budget`.
fn gather_pairs(
    images: &[perisr::imagekit::RasterImage],
    scale: usize,
    budget: usize,
    seed: u64,
    source_prefix: &str,
) -> anyhow::Result<Vec<PatchPair>> {
    let mut pairs = Vec::new();
    for (i, img) in images.iter().enumerate() {
        pairs.extend(extract_patch_pairs(img, scale, PATCH_STRIDE, &format!("{source_prefix}{i:04}"))?);
    }
    let plan = subsample_plan(pairs.len(), budget, seed);
    if plan.len() < pairs.len() {
        let mut kept: Vec<Option<PatchPair>> = pairs.into_iter().map(Some).collect();
        pairs = plan.iter().map(|&i| kept[i].take().expect("plan indices are distinct")).collect();
    }
    Ok(pairs)
}

fn load_partition_images(
    entries: &[perisr::pipeline::ManifestEntry],
) -> anyhow::Result<Vec<perisr::imagekit::RasterImage>> {
    entries
        .iter()
        .map(|e| load_image(&e.image_path).with_context(|| format!("loading {}", e.image_path.display())))
        .collect()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Synth { subjects, per_subject, seed, out } => {
            let report = generate_synthetic_corpus(subjects, per_subject, seed, &out)?;
            eprintln!("generated {} images under {}", report.image_count, out.display());
            let config = serde_json::json!({
                "subjects": subjects,
                "per_subject": per_subject,
                "out": out.display().to_string(),
            });
            write_provenance(&out, seed, &config, &[])?;
            println!("{}", report.manifest_path.display());
        }
        Command::TrainSr {
            manifest,
            scale,
            seed,
            batch,
            epochs,
            lr,
            momentum,
            patch_budget,
            out,
        } => {
            let entries = load_manifest(&manifest)?;
            let split = split_person_disjoint(&entries, SplitRatios::default(), seed)?;
            eprintln!(
                "training on the {}-image train partition at {scale}x...",
                split.train.len()
            );
            let train_images = load_partition_images(&split.train)?;
            let config = TrainConfig {
                batch_size: batch,
                epochs,
                learning_rate: lr,
                momentum,
                seed,
            };
            let report = run_sr_training(&train_images, scale as usize, &config, patch_budget)?;
            let dir = artifact_dir(&out);
            std::fs::create_dir_all(&dir)?;
            save_model(&report.model, &out)?;

            let loss_path = out.with_extension("loss.csv");
            let mut loss_csv = String::from("epoch,mse\n");
            for (i, loss) in report.loss_history.iter().enumerate() {
                loss_csv.push_str(&format!("{},{loss:.9e}\n", i + 1));
            }
            std::fs::write(&loss_path, loss_csv)?;

            let config_json = serde_json::json!({
                "scale": scale,
                "batch": batch,
                "epochs": epochs,
                "lr": lr,
                "momentum": momentum,
                "patch_budget": patch_budget,
                "pairs_used": report.pairs_used,
                "model": out.display().to_string(),
            });
            write_provenance(&dir, seed, &config_json, &[input_record(&manifest)?])?;
            eprintln!("trained on {} pairs; loss history at {}", report.pairs_used, loss_path.display());
            println!("{}", out.display());
        }
        Command::Upscale { model, input, scale, out } => {
            let net = load_model(&model)?;
            let img = load_image(&input)?;
            let big = upscale(&net, &img, scale as usize)?;
            let dir = artifact_dir(&out);
            std::fs::create_dir_all(&dir)?;
            save_image(&big, &out)?;
            let config_json = serde_json::json!({
                "scale": scale,
                "out": out.display().to_string(),
            });
            write_provenance(&dir, 0, &config_json, &[input_record(&model)?, input_record(&input)?])?;
            println!("{}", out.display());
        }
        Command::Experiment {
            manifest,
            seed,
            scales,
            kinds,
            trees,
            patch_budget,
            jobs,
            out,
        } => {
            if let Some(n) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .context("configuring the worker pool")?;
            }
            let options = ExperimentOptions {
                seed,
                kinds,
                tree_counts: trees,
                scales: scales.into_iter().map(|s| s as usize).collect(),
                patch_budget,
                sr_epochs: None,
            };
            let summary = run_full_experiment(&manifest, &out, &options)?;
            if let Some(table) = &summary.table {
                eprint!("{}", table.to_aligned_text());
            }
            println!("{}", summary.results_csv.display());
        }
        Command::GridSearch { manifest, seed, limit, patch_budget, out } => {
            let entries = load_manifest(&manifest)?;
            let split = split_person_disjoint(&entries, SplitRatios::default(), seed)?;
            let train_images = load_partition_images(&split.train)?;
            let val_images = load_partition_images(&split.validation)?;
            let train_pairs = gather_pairs(
                &train_images,
                2,
                patch_budget,
                derive_seed_str(seed, "grid/train"),
                "train",
            )?;
            let val_pairs = gather_pairs(
                &val_images,
                2,
                patch_budget,
                derive_seed_str(seed, "grid/val"),
                "val",
            )?;
            eprintln!(
                "scoring the grid on {} train / {} validation pairs...",
                train_pairs.len(),
                val_pairs.len()
            );

            let grid = GridSpec::reference();
            let (best, rows) = grid_search_limited(&train_pairs, &val_pairs, &grid, seed, limit)?;
            let dir = artifact_dir(&out);
            std::fs::create_dir_all(&dir)?;
            write_grid_ledger(&out, &rows)?;

            let best_row = rows
                .iter()
                .find(|r| {
                    r.batch_size == best.batch_size
                        && r.epochs == best.epochs
                        && r.learning_rate == best.learning_rate
                        && r.momentum == best.momentum
                })
                .expect("the winning config was scored");
            let best_json = serde_json::json!({
                "batch": best.batch_size,
                "epochs": best.epochs,
                "lr": best.learning_rate,
                "momentum": best.momentum,
                "val_mse": best_row.val_mse,
            });
            let best_path = out.with_extension("best.json");
            std::fs::write(&best_path, format!("{}\n", serde_json::to_string_pretty(&best_json)?))?;

            let config_json = serde_json::json!({
                "limit": limit,
                "patch_budget": patch_budget,
                "scale": 2,
                "ledger": out.display().to_string(),
            });
            write_provenance(&dir, seed, &config_json, &[input_record(&manifest)?])?;
            println!("{}", out.display());
            println!("{}", best_path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
