use ndarray::Array2;

use super::{DistanceMatrix, FiltrationWeights, GraphRegularizer};
use crate::error::{Error, Result};

/// Filtration radii `d_min + (t/T)(d_max - d_min)` for `t = 1..=T`. The last
/// radius is exactly `d_max`.
pub fn cutoff_radii(d: &DistanceMatrix, levels: usize) -> Vec<f64> {
    let (lo, hi) = d.off_diagonal_range();
    let span = hi - lo;
    (1..=levels)
        .map(|t| {
            if t == levels {
                hi
            } else {
                lo + (t as f64 / levels as f64) * span
            }
        })
        .collect()
}

/// Unweighted Vietoris-Rips 1-skeleton: `i != j` joined when `d_ij <= radius`.
pub fn threshold_graph(d: &DistanceMatrix, radius: f64) -> GraphRegularizer {
    let m = d.len();
    let a = Array2::from_shape_fn((m, m), |(i, j)| {
        if i != j && d.get(i, j) <= radius {
            1.0
        } else {
            0.0
        }
    });
    GraphRegularizer::from_adjacency(a).expect("threshold graph is a valid adjacency")
}

/// Persistent Laplacian over a distance-cutoff filtration:
/// `PA = sum_t zeta_t A^t` with `A^t` the threshold graph at radius `r_t`.
pub fn cutoff_persistent_laplacian(
    d: &DistanceMatrix,
    weights: &FiltrationWeights,
) -> Result<GraphRegularizer> {
    let m = d.len();
    if m < 2 {
        return Err(Error::Shape("need at least two points".into()));
    }
    let (lo, hi) = d.off_diagonal_range();
    if hi == lo {
        log::warn!("all pairwise distances equal {lo}; filtration collapses to the complete graph");
    }
    let radii = cutoff_radii(d, weights.levels());
    let suffix = weights.suffix_sums();
    let mut a = Array2::zeros((m, m));
    for i in 0..m {
        for j in (i + 1)..m {
            // first level whose radius admits the edge; every later level
            // contains it too
            let first = radii.partition_point(|&r| r < d.get(i, j));
            let w = suffix[first];
            a[[i, j]] = w;
            a[[j, i]] = w;
        }
    }
    GraphRegularizer::from_adjacency(a)
}

/// Persistent Laplacian over the k-NN filtration `t = 1..=T`.
///
/// Level `t` joins `i` and `j` when either is among the other's `t`
/// nearest neighbors, i.e. the union symmetrization `a + a' - a*a'` of the
/// binary directed t-NN adjacency. Levels are weighted and summed after
/// symmetrization so the adjacency stays nonnegative for any weights.
pub fn knn_persistent_laplacian(
    d: &DistanceMatrix,
    weights: &FiltrationWeights,
) -> Result<GraphRegularizer> {
    let m = d.len();
    let levels = weights.levels();
    if levels >= m {
        return Err(Error::OutOfRange(format!(
            "{levels} filtration levels need more than {m} points"
        )));
    }
    let suffix = weights.suffix_sums();
    let mut a: Array2<f64> = Array2::zeros((m, m));
    for (i, nbrs) in d.nearest_neighbors(levels).into_iter().enumerate() {
        for (rank, j) in nbrs.into_iter().enumerate() {
            // suffix sums are nonincreasing, so the max picks the earlier of
            // the two directed ranks
            let w = suffix[rank];
            if w > a[[i, j]] {
                a[[i, j]] = w;
                a[[j, i]] = w;
            }
        }
    }
    GraphRegularizer::from_adjacency(a)
}
