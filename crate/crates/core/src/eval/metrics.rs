use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::hungarian::max_weight_assignment;
use super::kmeans::ClusterAssignment;
use crate::data::LabelVector;
use crate::error::{Error, Result};

/// Counts `n_ij` of samples with true class `i` and cluster `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub n: Array2<usize>,
    /// Row sums (class sizes).
    pub a: Vec<usize>,
    /// Column sums (cluster sizes).
    pub b: Vec<usize>,
    pub total: usize,
}

impl ContingencyTable {
    /// Builds the table from per-sample class and cluster indices. The
    /// table has `max + 1` rows and columns on each side.
    pub fn from_indices(classes: &[usize], clusters: &[usize]) -> Result<Self> {
        let rows = classes.iter().max().map_or(0, |m| m + 1);
        let cols = clusters.iter().max().map_or(0, |m| m + 1);
        Self::with_shape(classes, clusters, rows, cols)
    }

    pub fn with_shape(
        classes: &[usize],
        clusters: &[usize],
        rows: usize,
        cols: usize,
    ) -> Result<Self> {
        if classes.len() != clusters.len() {
            return Err(Error::LabelMismatch {
                labels: classes.len(),
                cells: clusters.len(),
            });
        }
        let mut n = Array2::zeros((rows, cols));
        for (&y, &c) in classes.iter().zip(clusters) {
            if y >= rows || c >= cols {
                return Err(Error::OutOfRange(format!(
                    "label pair ({y}, {c}) outside a {rows} x {cols} table"
                )));
            }
            n[[y, c]] += 1;
        }
        let a = n.rows().into_iter().map(|r| r.sum()).collect();
        let b = n.columns().into_iter().map(|c| c.sum()).collect();
        Ok(Self {
            n,
            a,
            b,
            total: classes.len(),
        })
    }

    /// Whether the two partitions are equal up to relabeling.
    pub fn is_identical_partition(&self) -> bool {
        let one_per_row = self
            .n
            .rows()
            .into_iter()
            .all(|r| r.iter().filter(|v| **v > 0).count() <= 1);
        let one_per_col = self
            .n
            .columns()
            .into_iter()
            .all(|c| c.iter().filter(|v| **v > 0).count() <= 1);
        one_per_row && one_per_col
    }
}

pub fn contingency(y: &LabelVector, c: &ClusterAssignment) -> Result<ContingencyTable> {
    let cols = c
        .num_clusters()
        .max(c.labels.iter().max().map_or(0, |m| m + 1));
    ContingencyTable::with_shape(&y.indices(), &c.labels, y.num_classes(), cols)
}

fn comb2(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

/// Adjusted Rand index (Hubert-Arabie).
pub fn ari(t: &ContingencyTable) -> f64 {
    let index: f64 = t.n.iter().map(|&v| comb2(v)).sum();
    let sum_a: f64 = t.a.iter().map(|&v| comb2(v)).sum();
    let sum_b: f64 = t.b.iter().map(|&v| comb2(v)).sum();
    let expected = sum_a * sum_b / comb2(t.total);
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom == 0.0 {
        return if t.is_identical_partition() { 1.0 } else { 0.0 };
    }
    (index - expected) / denom
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NmiNormalization {
    /// `2 I / (H(Y) + H(C))`
    #[default]
    Arithmetic,
    /// `I / sqrt(H(Y) H(C))`
    Geometric,
}

fn entropy(counts: &[usize], total: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information with natural logarithms.
pub fn nmi(t: &ContingencyTable, normalization: NmiNormalization) -> f64 {
    let total = t.total as f64;
    let hy = entropy(&t.a, total);
    let hc = entropy(&t.b, total);
    if hy == 0.0 && hc == 0.0 {
        return 1.0;
    }
    let mut mi = 0.0;
    for ((i, j), &nij) in t.n.indexed_iter() {
        if nij > 0 {
            let nij = nij as f64;
            mi += nij / total * (total * nij / (t.a[i] as f64 * t.b[j] as f64)).ln();
        }
    }
    let mi = mi.max(0.0);
    let score = match normalization {
        NmiNormalization::Arithmetic => 2.0 * mi / (hy + hc),
        NmiNormalization::Geometric => {
            let g = (hy * hc).sqrt();
            if g == 0.0 {
                return 0.0;
            }
            mi / g
        }
    };
    score.clamp(0.0, 1.0)
}

/// Hungarian alignment of clusters to classes maximizing the number of
/// agreeing samples. Entry `j` is the class assigned to cluster `j`, or
/// `None` when there are more clusters than classes and `j` lost out.
pub fn align_labels(t: &ContingencyTable) -> Vec<Option<usize>> {
    let weights: Vec<Vec<f64>> =
        t.n.columns()
            .into_iter()
            .map(|col| col.iter().map(|&v| v as f64).collect())
            .collect();
    max_weight_assignment(&weights)
}

fn matched(t: &ContingencyTable) -> usize {
    align_labels(t)
        .into_iter()
        .enumerate()
        .filter_map(|(j, i)| i.map(|i| t.n[[i, j]]))
        .sum()
}

/// Fraction of samples whose Hungarian-aligned cluster equals the true class.
pub fn accuracy(y: &LabelVector, c: &ClusterAssignment) -> Result<f64> {
    let t = contingency(y, c)?;
    Ok(accuracy_from_table(&t))
}

pub(crate) fn accuracy_from_table(t: &ContingencyTable) -> f64 {
    matched(t) as f64 / t.total as f64
}

/// Each cluster votes for its plurality class; no injectivity.
pub fn purity(y: &LabelVector, c: &ClusterAssignment) -> Result<f64> {
    let t = contingency(y, c)?;
    Ok(purity_from_table(&t))
}

pub(crate) fn purity_from_table(t: &ContingencyTable) -> f64 {
    let hits: usize =
        t.n.columns()
            .into_iter()
            .map(|col| col.iter().copied().max().unwrap_or(0))
            .sum();
    hits as f64 / t.total as f64
}
