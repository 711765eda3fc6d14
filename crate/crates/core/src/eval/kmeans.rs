use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_RESTARTS: usize = 10;
pub const MAX_LLOYD_ITERS: usize = 300;

/// Hard clustering of the columns of a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    /// One row per cluster.
    pub centroids: Array2<f64>,
    /// Sum of squared distances from each point to its centroid.
    pub inertia: f64,
}

impl ClusterAssignment {
    pub fn num_clusters(&self) -> usize {
        self.centroids.nrows()
    }
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// k-means++ seeding. `points` holds one point per row.
fn plus_plus(points: ArrayView2<'_, f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let m = points.nrows();
    let mut chosen = vec![rng.random_range(0..m)];
    let mut best: Vec<f64> = (0..m)
        .map(|i| sq_dist(points.row(i), points.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let next = match WeightedIndex::new(&best) {
            Ok(dist) => dist.sample(rng),
            // every remaining point coincides with a chosen centroid
            Err(_) => (0..m).find(|i| !chosen.contains(i)).unwrap_or(0),
        };
        chosen.push(next);
        for (i, b) in best.iter_mut().enumerate() {
            *b = b.min(sq_dist(points.row(i), points.row(next)));
        }
    }
    let mut c = Array2::zeros((k, points.ncols()));
    for (row, &i) in chosen.iter().enumerate() {
        c.row_mut(row).assign(&points.row(i));
    }
    c
}

fn assign(points: ArrayView2<'_, f64>, centroids: &Array2<f64>) -> (Vec<usize>, Vec<f64>) {
    points
        .rows()
        .into_iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (c, row) in centroids.rows().into_iter().enumerate() {
                let d = sq_dist(p, row);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

/// Lloyd iterations from the given centroids (one per row) until the
/// assignment stops changing or `max_iters` is reached. `points` holds one
/// point per row. Returns the clustering and the inertia after every
/// assignment step.
///
/// A cluster that ends up empty takes over the point farthest from its
/// current centroid.
pub fn lloyd(
    points: ArrayView2<'_, f64>,
    mut centroids: Array2<f64>,
    max_iters: usize,
) -> (ClusterAssignment, Vec<f64>) {
    let k = centroids.nrows();
    let (mut labels, mut dists) = assign(points, &centroids);
    let mut trace = vec![dists.iter().sum::<f64>()];
    for _ in 0..max_iters {
        // update step
        let mut sums = Array2::<f64>::zeros(centroids.dim());
        let mut counts = vec![0usize; k];
        for (p, &l) in points.rows().into_iter().zip(&labels) {
            sums.row_mut(l).zip_mut_with(&p, |s, v| *s += v);
            counts[l] += 1;
        }
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                let n = count as f64;
                centroids.row_mut(c).assign(&sums.row(c).mapv(|s| s / n));
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..labels.len())
                    .filter(|&i| counts[labels[i]] > 1)
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
                if let Some(i) = far {
                    counts[labels[i]] -= 1;
                    counts[c] += 1;
                    labels[i] = c;
                    dists[i] = 0.0;
                    centroids.row_mut(c).assign(&points.row(i));
                }
            }
        }

        let (next, next_d) = assign(points, &centroids);
        trace.push(next_d.iter().sum());
        let stable = next == labels;
        labels = next;
        dists = next_d;
        if stable {
            break;
        }
    }
    let inertia = dists.iter().sum();
    (
        ClusterAssignment {
            labels,
            centroids,
            inertia,
        },
        trace,
    )
}

/// k-means on the columns of `h` (features × samples) with k-means++
/// seeding. Restart `i` uses seed `seed + i`; the lowest-inertia run wins,
/// earlier restarts winning ties.
pub fn kmeans(
    h: &Array2<f64>,
    clusters: usize,
    seed: u64,
    restarts: usize,
) -> Result<ClusterAssignment> {
    let m = h.ncols();
    if clusters == 0 || clusters > m {
        return Err(Error::OutOfRange(format!(
            "cannot form {clusters} clusters from {m} points"
        )));
    }
    let points = h.t().as_standard_layout().into_owned();
    let runs: Vec<ClusterAssignment> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r));
            let init = plus_plus(points.view(), clusters, &mut rng);
            lloyd(points.view(), init, MAX_LLOYD_ITERS).0
        })
        .collect();
    Ok(runs
        .into_iter()
        .reduce(|best, run| {
            if run.inertia < best.inertia {
                run
            } else {
                best
            }
        })
        .expect("at least one restart"))
}
