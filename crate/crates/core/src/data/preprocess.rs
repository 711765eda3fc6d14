use std::collections::HashMap;

use ndarray::{Axis, Zip};

use super::matrix::{ExpressionMatrix, LabelVector};
use crate::error::{Error, Result};

/// Classes with fewer cells than this are dropped before benchmarking.
pub const DEFAULT_MIN_CELLS: usize = 15;

/// Drops every cell whose class has fewer than `min_cells` members.
pub fn filter_rare_classes(
    x: &ExpressionMatrix,
    y: &LabelVector,
    min_cells: usize,
) -> Result<(ExpressionMatrix, LabelVector)> {
    y.check_matches(x)?;
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for l in y.labels() {
        *counts.entry(l.as_str()).or_default() += 1;
    }
    let keep: Vec<usize> = y
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| counts[l.as_str()] >= min_cells)
        .map(|(j, _)| j)
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyAfterFilter { min_cells });
    }
    if keep.len() == y.len() {
        return Ok((x.clone(), y.clone()));
    }
    let values = x.values().select(Axis(1), &keep);
    let cells = keep.iter().map(|&j| x.cell_ids()[j].clone()).collect();
    let labels = keep.iter().map(|&j| y.labels()[j].clone()).collect();
    Ok((
        ExpressionMatrix::new(values, x.gene_ids().to_vec(), cells)?,
        LabelVector::new(labels)?,
    ))
}

/// Optional gene filter: keeps genes with a nonzero value in at least
/// `min_cells` cells.
pub fn filter_low_abundance_genes(
    x: &ExpressionMatrix,
    min_cells: usize,
) -> Result<ExpressionMatrix> {
    let keep: Vec<usize> = x
        .values()
        .rows()
        .into_iter()
        .enumerate()
        .filter(|(_, row)| row.iter().filter(|v| **v > 0.0).count() >= min_cells)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(Error::Shape(format!(
            "no gene is expressed in at least {min_cells} cells"
        )));
    }
    let values = x.values().select(Axis(0), &keep);
    let genes = keep.iter().map(|&i| x.gene_ids()[i].clone()).collect();
    ExpressionMatrix::new(values, genes, x.cell_ids().to_vec())
}

/// `v -> ln(1 + v)` entrywise.
pub fn log_normalize(x: &ExpressionMatrix) -> Result<ExpressionMatrix> {
    x.with_values(x.values().mapv(f64::ln_1p))
}

/// Scales every cell (column) to unit Euclidean norm.
pub fn unit_scale_columns(x: &ExpressionMatrix) -> Result<ExpressionMatrix> {
    let mut values = x.values().clone();
    for (j, mut col) in values.columns_mut().into_iter().enumerate() {
        let norm = col.dot(&col).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroColumn(j));
        }
        col.mapv_inplace(|v| v / norm);
    }
    debug_assert!(Zip::from(&values).all(|v| *v >= 0.0));
    x.with_values(values)
}
