use std::collections::{HashMap, HashSet};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Dense nonnegative genes × cells matrix with row and column identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    values: Array2<f64>,
    gene_ids: Vec<String>,
    cell_ids: Vec<String>,
}

impl ExpressionMatrix {
    pub fn new(values: Array2<f64>, gene_ids: Vec<String>, cell_ids: Vec<String>) -> Result<Self> {
        let (n, m) = values.dim();
        if n < 1 || m < 2 {
            return Err(Error::Shape(format!(
                "need at least 1 gene and 2 cells, got {n} x {m}"
            )));
        }
        if gene_ids.len() != n || cell_ids.len() != m {
            return Err(Error::Shape(format!(
                "{} gene ids and {} cell ids for a {n} x {m} matrix",
                gene_ids.len(),
                cell_ids.len()
            )));
        }
        for ((row, col), &v) in values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row, col });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry { row, col, value: v });
            }
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &gene_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateGene(id.clone()));
            }
        }
        Ok(Self {
            values,
            gene_ids,
            cell_ids,
        })
    }

    /// Builds a matrix with generated ids `g0..` and `c0..`.
    pub fn from_values(values: Array2<f64>) -> Result<Self> {
        let (n, m) = values.dim();
        let genes = (0..n).map(|i| format!("g{i}")).collect();
        let cells = (0..m).map(|j| format!("c{j}")).collect();
        Self::new(values, genes, cells)
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn gene_ids(&self) -> &[String] {
        &self.gene_ids
    }

    pub fn cell_ids(&self) -> &[String] {
        &self.cell_ids
    }

    pub fn n_genes(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cells(&self) -> usize {
        self.values.ncols()
    }

    pub fn into_parts(self) -> (Array2<f64>, Vec<String>, Vec<String>) {
        (self.values, self.gene_ids, self.cell_ids)
    }

    /// Replaces the values, keeping ids. Used by transforms that cannot
    /// break the invariants (same shape, nonnegative output).
    pub(crate) fn with_values(&self, values: Array2<f64>) -> Result<Self> {
        Self::new(values, self.gene_ids.clone(), self.cell_ids.clone())
    }
}

/// One class label per cell, plus the distinct classes in first-appearance
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<String>,
    classes: Vec<String>,
}

impl LabelVector {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Shape("empty label vector".into()));
        }
        let mut seen = HashSet::new();
        let classes = labels
            .iter()
            .filter(|l| seen.insert(l.as_str()))
            .cloned()
            .collect();
        Ok(Self { labels, classes })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Index into [`classes`](Self::classes) for every sample.
    pub fn indices(&self) -> Vec<usize> {
        let lookup: HashMap<&str, usize> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        self.labels.iter().map(|l| lookup[l.as_str()]).collect()
    }

    pub fn check_matches(&self, x: &ExpressionMatrix) -> Result<()> {
        if self.len() != x.n_cells() {
            return Err(Error::LabelMismatch {
                labels: self.len(),
                cells: x.n_cells(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_negative_and_nan() {
        let err = ExpressionMatrix::from_values(array![[1.0, -1.0]]).unwrap_err();
        assert!(err.to_string().contains("negative entry"));
        let err = ExpressionMatrix::from_values(array![[1.0, f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { row: 0, col: 1 }));
        let err = ExpressionMatrix::from_values(array![[1.0, f64::INFINITY]]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { .. }));
    }

    #[test]
    fn rejects_single_cell_and_duplicate_gene() {
        assert!(ExpressionMatrix::from_values(array![[1.0], [2.0]]).is_err());
        let err = ExpressionMatrix::new(
            array![[1.0, 2.0], [3.0, 4.0]],
            vec!["g".into(), "g".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateGene(_)));
    }

    #[test]
    fn classes_in_first_appearance_order() {
        let y = LabelVector::new(["b", "a", "b", "c"].map(String::from).to_vec()).unwrap();
        assert_eq!(y.classes(), ["b", "a", "c"]);
        assert_eq!(y.indices(), vec![0, 1, 0, 2]);
    }
}
