use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView1, Axis};

use super::FactorPair;
use crate::data::ExpressionMatrix;
use crate::error::{Error, Result};

/// Leading singular triplets, largest first: `X ~ U diag(s) V^T`.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub u: Array2<f64>,
    pub s: Array1<f64>,
    pub v: Array2<f64>,
}

/// Rank-`rank` SVD through the eigendecomposition of the Gram matrix of the
/// smaller side. Singular vectors are sign-normalized so that each one's
/// largest-magnitude entry on the Gram side is positive.
pub fn truncated_svd(x: &Array2<f64>, rank: usize) -> Result<TruncatedSvd> {
    let (n, m) = x.dim();
    if rank == 0 || rank > n.min(m) {
        return Err(Error::OutOfRange(format!(
            "rank {rank} must be in 1..={}",
            n.min(m)
        )));
    }
    let gram_on_cells = m <= n;
    let gram = if gram_on_cells {
        x.t().dot(x)
    } else {
        x.dot(&x.t())
    };
    let k = gram.nrows();
    let mat = DMatrix::from_fn(k, k, |i, j| gram[[i, j]]);
    let eig = SymmetricEigen::try_new(mat, f64::EPSILON, 0)
        .ok_or_else(|| Error::Decomposition("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    order.truncate(rank);

    let mut small = Array2::zeros((k, rank));
    let mut s = Array1::zeros(rank);
    for (p, &idx) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(idx);
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..k {
            small[[i, p]] = sign * col[i];
        }
        s[p] = eig.eigenvalues[idx].max(0.0).sqrt();
    }

    // the other side: X v / s (or X^T u / s)
    let mut other = if gram_on_cells {
        x.dot(&small)
    } else {
        x.t().dot(&small)
    };
    for (p, mut col) in other.axis_iter_mut(Axis(1)).enumerate() {
        if s[p] > 0.0 {
            col.mapv_inplace(|v| v / s[p]);
        } else {
            col.fill(0.0);
        }
    }
    let (u, v) = if gram_on_cells {
        (other, small)
    } else {
        (small, other)
    };
    Ok(TruncatedSvd { u, s, v })
}

fn split_norms(a: ArrayView1<'_, f64>) -> (Array1<f64>, Array1<f64>, f64, f64) {
    let pos = a.mapv(|v| v.max(0.0));
    let neg = a.mapv(|v| (-v).max(0.0));
    let pn = pos.dot(&pos).sqrt();
    let nn = neg.dot(&neg).sqrt();
    (pos, neg, pn, nn)
}

/// NNDSVD initialization with zeros filled by the mean of `X`.
///
/// The leading singular pair gives the first factor directly (absolute
/// values). Every later pair is split into positive and negative parts and
/// the part with the larger norm product is kept, rescaled by
/// `sqrt(s_p * m)`.
pub fn nndsvda_init(x: &ExpressionMatrix, rank: usize) -> Result<FactorPair> {
    let values = x.values();
    let (n, m) = values.dim();
    let svd = truncated_svd(values, rank)?;
    if svd.s[0] == 0.0 {
        return Err(Error::Decomposition("matrix is identically zero".into()));
    }

    let mut w = Array2::<f64>::zeros((n, rank));
    let mut h = Array2::<f64>::zeros((rank, m));
    let lead = svd.s[0].sqrt();
    w.column_mut(0)
        .assign(&svd.u.column(0).mapv(|v| lead * v.abs()));
    h.row_mut(0)
        .assign(&svd.v.column(0).mapv(|v| lead * v.abs()));

    for p in 1..rank {
        let (up, un, upn, unn) = split_norms(svd.u.column(p));
        let (vp, vn, vpn, vnn) = split_norms(svd.v.column(p));
        let (mp, mn) = (upn * vpn, unn * vnn);
        let (uu, vv, un_, vn_, mag) = if mp > mn {
            (up, vp, upn, vpn, mp)
        } else {
            (un, vn, unn, vnn, mn)
        };
        if mag == 0.0 {
            continue;
        }
        let scale = (svd.s[p] * mag).sqrt();
        w.column_mut(p).assign(&(uu * (scale / un_)));
        h.row_mut(p).assign(&(vv * (scale / vn_)));
    }

    let mean = values.mean().unwrap_or(0.0);
    w.mapv_inplace(|v| if v == 0.0 { mean } else { v });
    h.mapv_inplace(|v| if v == 0.0 { mean } else { v });
    Ok(FactorPair::new(w, h))
}
