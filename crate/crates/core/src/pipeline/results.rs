//! Results assembly: collect per-cell accuracies into the canonical
//! 12-row x 6-column table (impurity kind x tree count down the rows,
//! scale x eye across the columns) and render it as CSV and aligned text.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::forest::ImpurityKind;

use super::manifest::Eye;
use super::PipelineError;

/// Tree counts reported in the results table, ascending.
pub const TABLE_TREE_COUNTS: [usize; 4] = [100, 300, 500, 1000];
/// Magnification scales reported in the results table.
pub const TABLE_SCALES: [usize; 3] = [1, 2, 3];

/// One measured cell of the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellResult {
    pub kind: ImpurityKind,
    pub trees: usize,
    pub scale: usize,
    pub eye: Eye,
    pub accuracy_pct: f64,
}

/// The assembled 12x6 accuracy table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    /// Row-major accuracies: rows ordered (kind, trees), columns (scale, eye).
    cells: Vec<[f64; 6]>,
}

fn kind_order(kind: ImpurityKind) -> usize {
    ImpurityKind::ALL.iter().position(|&k| k == kind).expect("every kind is listed")
}

fn column_of(scale: usize, eye: Eye) -> Option<usize> {
    let s = TABLE_SCALES.iter().position(|&v| v == scale)?;
    Some(2 * s + usize::from(eye == Eye::Right))
}

fn row_of(kind: ImpurityKind, trees: usize) -> Option<usize> {
    let t = TABLE_TREE_COUNTS.iter().position(|&v| v == trees)?;
    Some(TABLE_TREE_COUNTS.len() * kind_order(kind) + t)
}

/// Assembles loose cell results into the canonical table.
///
/// Every (kind, trees, scale, eye) combination must be present exactly once;
/// a missing combination is an [`PipelineError::IncompleteResults`] naming
/// the key, duplicates and out-of-range keys are a
/// [`PipelineError::BadParameter`].
pub fn emit_results_table(results: &[CellResult]) -> Result<ResultsTable, PipelineError> {
    let mut seen: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for cell in results {
        let (Some(row), Some(col)) = (row_of(cell.kind, cell.trees), column_of(cell.scale, cell.eye))
        else {
            return Err(PipelineError::BadParameter(format!(
                "result key ({}, {} trees, {}x, {}) is outside the table",
                cell.kind.tag(),
                cell.trees,
                cell.scale,
                cell.eye
            )));
        };
        if !(0.0..=100.0).contains(&cell.accuracy_pct) {
            return Err(PipelineError::BadParameter(format!(
                "accuracy {} is outside [0, 100]",
                cell.accuracy_pct
            )));
        }
        if seen.insert((row, col), cell.accuracy_pct).is_some() {
            return Err(PipelineError::BadParameter(format!(
                "duplicate result for ({}, {} trees, {}x, {})",
                cell.kind.tag(),
                cell.trees,
                cell.scale,
                cell.eye
            )));
        }
    }

    let mut cells = vec![[0.0f64; 6]; 12];
    for (r, kind) in ImpurityKind::ALL.into_iter().enumerate() {
        for (t, &trees) in TABLE_TREE_COUNTS.iter().enumerate() {
            for (s, &scale) in TABLE_SCALES.iter().enumerate() {
                for eye in Eye::BOTH {
                    let row = TABLE_TREE_COUNTS.len() * r + t;
                    let col = 2 * s + usize::from(eye == Eye::Right);
                    let Some(&value) = seen.get(&(row, col)) else {
                        return Err(PipelineError::IncompleteResults(format!(
                            "({}, {trees} trees, {scale}x, {eye})",
                            kind.tag()
                        )));
                    };
                    cells[row][col] = value;
                }
            }
        }
    }
    Ok(ResultsTable { cells })
}

impl ResultsTable {
    /// Accuracy at one table position.
    pub fn accuracy(&self, kind: ImpurityKind, trees: usize, scale: usize, eye: Eye) -> Option<f64> {
        let row = row_of(kind, trees)?;
        let col = column_of(scale, eye)?;
        Some(self.cells[row][col])
    }

    /// The table's cells flattened back into canonical row/column order.
    pub fn flat_cells(&self) -> Vec<CellResult> {
        let mut out = Vec::with_capacity(72);
        for kind in ImpurityKind::ALL {
            for trees in TABLE_TREE_COUNTS {
                for scale in TABLE_SCALES {
                    for eye in Eye::BOTH {
                        let row = row_of(kind, trees).expect("canonical key");
                        let col = column_of(scale, eye).expect("canonical key");
                        out.push(CellResult {
                            kind,
                            trees,
                            scale,
                            eye,
                            accuracy_pct: self.cells[row][col],
                        });
                    }
                }
            }
        }
        out
    }

    /// Renders the table as human-readable aligned text.
    pub fn to_aligned_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<10} {:>6}", "impurity", "trees"));
        for scale in TABLE_SCALES {
            for eye in Eye::BOTH {
                out.push_str(&format!(" {:>9}", format!("{scale}x/{eye}")));
            }
        }
        out.push('\n');
        for kind in ImpurityKind::ALL {
            for trees in TABLE_TREE_COUNTS {
                let row = row_of(kind, trees).expect("canonical key");
                out.push_str(&format!("{:<10} {:>6}", kind.tag(), trees));
                for value in self.cells[row] {
                    out.push_str(&format!(" {value:>9.2}"));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Writes the flat results CSV: `kind,trees,scale,eye,accuracy_pct`, rows in
/// canonical order, accuracies to two decimal places.
pub fn write_results_csv(path: &Path, table: &ResultsTable) -> Result<(), PipelineError> {
    let mut text = String::from("kind,trees,scale,eye,accuracy_pct\n");
    for cell in table.flat_cells() {
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
