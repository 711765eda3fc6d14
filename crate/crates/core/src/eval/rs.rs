use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::pairwise_distances_of_columns;

/// Residue (R) and similarity (S) scores per sample and their class and
/// global aggregates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RsReport {
    pub r_scores: Vec<f64>,
    pub s_scores: Vec<f64>,
    /// Mean R per class.
    pub cri: Vec<f64>,
    /// Mean S per class.
    pub csi: Vec<f64>,
    pub ri: f64,
    pub si: f64,
    pub rsd: f64,
    pub rsi: f64,
}

/// R and S scores of the samples (columns of `points`) under the class
/// assignment `labels`, whose values must cover `0..L` with no gaps.
///
/// `R_m` is the summed distance from `m` to every sample of another class,
/// divided by the largest such sum. `S_m` averages `1 - d/d_max` over the
/// samples of `m`'s own class, `m` itself included.
pub fn rs_scores(points: &Array2<f64>, labels: &[usize]) -> Result<RsReport> {
    let m = points.ncols();
    if labels.len() != m {
        return Err(Error::LabelMismatch {
            labels: labels.len(),
            cells: m,
        });
    }
    if m < 2 {
        return Err(Error::Shape("R/S scores need at least two samples".into()));
    }
    let classes = labels.iter().max().map_or(0, |l| l + 1);
    let mut sizes = vec![0usize; classes];
    for &l in labels {
        sizes[l] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::OutOfRange(format!("class {empty} has no samples")));
    }

    let d = pairwise_distances_of_columns(points.view());
    let (_, d_max) = d.off_diagonal_range();
    if d_max == 0.0 {
        return Err(Error::Degenerate("all samples coincide (d_max = 0)".into()));
    }

    let mut inter = vec![0.0; m];
    let mut intra = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            let dij = d.get(i, j);
            if labels[j] == labels[i] {
                intra[i] += 1.0 - dij / d_max;
            } else {
                inter[i] += dij;
            }
        }
    }
    let r_max = inter.iter().copied().fold(0.0, f64::max);
    let r_scores: Vec<f64> = if r_max > 0.0 {
        inter.iter().map(|v| v / r_max).collect()
    } else {
        log::warn!("a single class covers every sample; R scores set to 0");
        vec![0.0; m]
    };
    let s_scores: Vec<f64> = intra
        .iter()
        .zip(labels)
        .map(|(v, &l)| v / sizes[l] as f64)
        .collect();

    let mut cri = vec![0.0; classes];
    let mut csi = vec![0.0; classes];
    for ((r, s), &l) in r_scores.iter().zip(&s_scores).zip(labels) {
        cri[l] += r;
        csi[l] += s;
    }
    for l in 0..classes {
        cri[l] /= sizes[l] as f64;
        csi[l] /= sizes[l] as f64;
    }
    let ri = cri.iter().sum::<f64>() / classes as f64;
    let si = csi.iter().sum::<f64>() / classes as f64;
    Ok(RsReport {
        r_scores,
        s_scores,
        cri,
        csi,
        ri,
        si,
        rsd: ri - si,
        rsi: 1.0 - (ri - si).abs(),
    })
}
