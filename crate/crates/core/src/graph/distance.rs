use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::data::ExpressionMatrix;
use crate::error::{Error, Result};

/// Symmetric matrix of pairwise Euclidean distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    d: Array2<f64>,
}

impl DistanceMatrix {
    pub fn new(d: Array2<f64>) -> Result<Self> {
        let (m, m2) = d.dim();
        if m != m2 {
            return Err(Error::Dimension(format!("distance matrix is {m} x {m2}")));
        }
        for i in 0..m {
            if d[[i, i]] != 0.0 {
                return Err(Error::OutOfRange(format!(
                    "d[{i},{i}] = {} is not zero",
                    d[[i, i]]
                )));
            }
            for j in 0..i {
                let v = d[[i, j]];
                if !(v >= 0.0 && v.is_finite()) || v != d[[j, i]] {
                    return Err(Error::OutOfRange(format!(
                        "d[{i},{j}] = {v}, d[{j},{i}] = {}",
                        d[[j, i]]
                    )));
                }
            }
        }
        Ok(Self { d })
    }

    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.nrows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[[i, j]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.d
    }

    /// Smallest and largest off-diagonal distance.
    pub fn off_diagonal_range(&self) -> (f64, f64) {
        let m = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..m {
            for j in (i + 1)..m {
                let v = self.d[[i, j]];
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// The `k` nearest other points of every point, nearest first. Ties go
    /// to the smaller index.
    pub fn nearest_neighbors(&self, k: usize) -> Vec<Vec<usize>> {
        let m = self.len();
        (0..m)
            .map(|i| {
                let mut order: Vec<usize> = (0..m).filter(|&j| j != i).collect();
                let row = self.d.row(i);
                order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
                order.truncate(k);
                order
            })
            .collect()
    }
}

/// Distances between the cells (columns) of an expression matrix.
pub fn pairwise_distances(x: &ExpressionMatrix) -> DistanceMatrix {
    pairwise_distances_of_columns(x.values().view())
}

/// Exact Euclidean distances between the columns of `points`.
///
/// Each entry is an independent sum over the same coordinate order, so the
/// result does not depend on the number of worker threads.
pub fn pairwise_distances_of_columns(points: ArrayView2<'_, f64>) -> DistanceMatrix {
    let m = points.ncols();
    // one contiguous row per point
    let rows = points.t().as_standard_layout().into_owned();
    let upper: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let a = rows.row(i);
            ((i + 1)..m)
                .map(|j| {
                    let b = rows.row(j);
                    a.iter()
                        .zip(b.iter())
                        .map(|(p, q)| (p - q) * (p - q))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect();
    let mut d = Array2::zeros((m, m));
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    DistanceMatrix { d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn three_four_five() {
        let d = pairwise_distances_of_columns(array![[0.0, 3.0], [0.0, 4.0]].view());
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn coincident_columns() {
        let d = pairwise_distances_of_columns(array![[1.0, 1.0], [2.0, 2.0]].view());
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let d = pairwise_distances_of_columns(array![[0.0, 1.0, 0.5], [0.0, 0.0, h]].view());
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((d.get(i, j) - 1.0).abs() < 1e-15);
        }
        assert!(DistanceMatrix::new(d.as_array().clone()).is_ok());
    }

    #[test]
    fn neighbor_ties_prefer_smaller_index() {
        // points 0, 1, 2 on a line: 1 is equidistant from 0 and 2
        let d = pairwise_distances_of_columns(array![[0.0, 1.0, 2.0]].view());
        assert_eq!(d.nearest_neighbors(1), vec![vec![1], vec![0], vec![1]]);
        assert_eq!(d.nearest_neighbors(2)[1], vec![0, 2]);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(DistanceMatrix::new(array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(array![[1.0, 1.0], [1.0, 0.0]]).is_err());
    }
}
