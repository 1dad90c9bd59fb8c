//! Hyper-parameter grid search for the super-resolution trainer: enumerate
//! every combination of batch size, epoch count, learning rate, and momentum,
//! score each by validation MSE, and keep the argmin.

use std::fs;
use std::path::Path;

use crate::imagekit::PatchPair;
use crate::srcnn::{forward, mse_loss, train_srcnn, Tensor3, TrainConfig};

use super::PipelineError;

/// The four axes of the hyper-parameter search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub batch_sizes: Vec<usize>,
    pub epoch_values: Vec<usize>,
    pub learning_rates: Vec<f64>,
    pub momentum_values: Vec<f64>,
}

impl GridSpec {
    /// The reference search space: 6 batch sizes x 10 epoch counts x
    /// 5 learning rates x 9 momentum values = 2,700 combinations.
    pub fn reference() -> Self {
        Self {
            batch_sizes: vec![16, 32, 64, 128, 256, 512],
            epoch_values: (1..=10).map(|k| 10 * k).collect(),
            learning_rates: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            momentum_values: (1..=9).map(|k| f64::from(k) / 10.0).collect(),
        }
    }

    /// Every combination as a ready-to-run config, in lexicographic order
    /// (batch size, then epochs, then learning rate, then momentum, each in
    /// the order its axis lists). All configs share `seed`.
    pub fn configs(&self, seed: u64) -> Vec<TrainConfig> {
        let mut out = Vec::with_capacity(
            self.batch_sizes.len()
                * self.epoch_values.len()
                * self.learning_rates.len()
                * self.momentum_values.len(),
        );
        for &batch_size in &self.batch_sizes {
            for &epochs in &self.epoch_values {
                for &learning_rate in &self.learning_rates {
                    for &momentum in &self.momentum_values {
                        out.push(TrainConfig { batch_size, epochs, learning_rate, momentum, seed });
                    }
                }
            }
        }
        out
    }
}

/// One scored cell of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub val_mse: f64,
}

/// Mean MSE of a model's predictions over a set of validation patch pairs.
fn validation_mse(
    model: &crate::srcnn::SrcnnModel,
    val_pairs: &[PatchPair],
) -> Result<f64, PipelineError> {
    let mut total = 0.0;
    for pair in val_pairs {
        let (pred, _) = forward(model, &Tensor3::from_image(pair.input()))?;
        let (mse, _) = mse_loss(&pred, &Tensor3::from_image(pair.target()))?;
        total += mse;
    }
    Ok(total / val_pairs.len() as f64)
}

fn search_over<F>(
    configs: &[TrainConfig],
    mut eval: F,
) -> Result<(TrainConfig, Vec<GridRow>), PipelineError>
where
    F: FnMut(&TrainConfig) -> Result<f64, PipelineError>,
{
    if configs.is_empty() {
        return Err(PipelineError::BadParameter("the grid has an empty axis".into()));
    }
    let mut rows = Vec::with_capacity(configs.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, config) in configs.iter().enumerate() {
        let score = eval(config)?;
        rows.push(GridRow {
            batch_size: config.batch_size,
            epochs: config.epochs,
            learning_rate: config.learning_rate,
            momentum: config.momentum,
            val_mse: score,
        });
        let improves = match best {
            None => true,
            Some((_, incumbent)) => {
                score.is_finite() && (!incumbent.is_finite() || score < incumbent)
            }
        };
        if improves {
            best = Some((i, score));
        }
    }
    let (winner, _) = best.expect("at least one cell was scored");
    Ok((configs[winner], rows))
}

/// Runs `eval` on every grid cell and returns the config with the lowest
/// score plus the full score ledger in enumeration order.
///
/// Non-finite scores rank after every finite one; ties keep the earliest
/// (lexicographically first) cell.
pub fn grid_search_with<F>(
    grid: &GridSpec,
    seed: u64,
    eval: F,
) -> Result<(TrainConfig, Vec<GridRow>), PipelineError>
where
    F: FnMut(&TrainConfig) -> Result<f64, PipelineError>,
{
    search_over(&grid.configs(seed), eval)
}

/// Full grid search over the SR trainer: trains one model per cell on
/// `train_pairs` and scores it by mean MSE on `val_pairs`.
pub fn grid_search(
    train_pairs: &[PatchPair],
    val_pairs: &[PatchPair],
    grid: &GridSpec,
    seed: u64,
) -> Result<(TrainConfig, Vec<GridRow>), PipelineError> {
    grid_search_limited(train_pairs, val_pairs, grid, seed, 0)
}

/// [`grid_search`] restricted to the first `limit` cells in enumeration
/// order; `limit` 0 means the whole grid.
pub fn grid_search_limited(
    train_pairs: &[PatchPair],
    val_pairs: &[PatchPair],
    grid: &GridSpec,
    seed: u64,
    limit: usize,
) -> Result<(TrainConfig, Vec<GridRow>), PipelineError> {
    if val_pairs.is_empty() {
        return Err(PipelineError::EmptyValidationSet);
    }
    let mut configs = grid.configs(seed);
    if limit > 0 {
        configs.truncate(limit);
    }
    search_over(&configs, |config| {
        let (model, _) = train_srcnn(train_pairs, config)?;
        validation_mse(&model, val_pairs)
    })
}

/// Writes the score ledger as CSV: `batch,epochs,lr,momentum,val_mse`.
pub fn write_grid_ledger(path: &Path, rows: &[GridRow]) -> Result<(), PipelineError> {
    let mut text = String::from("batch,epochs,lr,momentum,val_mse\n");
    for row in rows {
        text.push_str(&format!(
            "{},{},{:e},{:.1},{:.6e}\n",
            row.batch_size, row.epochs, row.learning_rate, row.momentum, row.val_mse
        ));
    }
    fs::write(path, text)?;
    Ok(())
}
