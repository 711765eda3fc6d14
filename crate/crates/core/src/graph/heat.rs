use ndarray::Array2;

use super::{DistanceMatrix, GraphRegularizer};
use crate::error::{Error, Result};

fn knn_edges(d: &DistanceMatrix, k: usize) -> Result<Vec<(usize, usize)>> {
    let m = d.len();
    if k < 1 || k >= m {
        return Err(Error::OutOfRange(format!(
            "k = {k} must be in 1..={}",
            m.saturating_sub(1)
        )));
    }
    let mut edges: Vec<(usize, usize)> = d
        .nearest_neighbors(k)
        .into_iter()
        .enumerate()
        .flat_map(|(i, nbrs)| nbrs.into_iter().map(move |j| (i.min(j), i.max(j))))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}

/// Default heat-kernel width: the mean squared length of the undirected
/// k-NN edges. Falls back to 1 when every edge has length zero.
pub fn heat_kernel_sigma(d: &DistanceMatrix, k: usize) -> Result<f64> {
    let edges = knn_edges(d, k)?;
    let mean = edges.iter().map(|&(i, j)| d.get(i, j).powi(2)).sum::<f64>() / edges.len() as f64;
    if mean > 0.0 {
        Ok(mean)
    } else {
        log::warn!("all k-NN edges have zero length; using sigma = 1");
        Ok(1.0)
    }
}

/// Heat-kernel weighted k-NN graph. `i` and `j` are joined when either is
/// among the other's `k` nearest neighbors; the weight is
/// `exp(-d_ij^2 / sigma)`.
pub fn heat_kernel_knn_graph(d: &DistanceMatrix, k: usize, sigma: f64) -> Result<GraphRegularizer> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "sigma = {sigma} must be positive"
        )));
    }
    let m = d.len();
    let mut a = Array2::zeros((m, m));
    for (i, j) in knn_edges(d, k)? {
        let w = (-d.get(i, j).powi(2) / sigma).exp();
        a[[i, j]] = w;
        a[[j, i]] = w;
    }
    GraphRegularizer::from_adjacency(a)
}
