//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topo_nmf::data::ExpressionMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform [0, 1) matrix with no exact zeros in practice.
pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>())
}

pub fn random_expression(rows: usize, cols: usize, seed: u64) -> ExpressionMatrix {
    ExpressionMatrix::from_values(random_matrix(rows, cols, &mut rng(seed))).unwrap()
}

pub fn random_labels(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// Connected components of the graph with an edge wherever `adj` is nonzero.
pub fn union_find_components(adj: &Array2<f64>) -> usize {
    let m = adj.nrows();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..m {
        for j in 0..m {
            if adj[[i, j]] != 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..m).filter(|&i| find(&mut parent, i) == i).count()
}

/// ARI by counting agreeing pairs one pair at a time.
pub fn ari_pairs(y: &[usize], c: &[usize]) -> f64 {
    let n = y.len();
    let (mut both, mut same_y, mut same_c) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let sy = y[i] == y[j];
            let sc = c[i] == c[j];
            same_y += f64::from(u8::from(sy));
            same_c += f64::from(u8::from(sc));
            both += f64::from(u8::from(sy && sc));
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let expected = same_y * same_c / pairs;
    let max = 0.5 * (same_y + same_c);
    if max == expected {
        return if both == max { 1.0 } else { 0.0 };
    }
    (both - expected) / (max - expected)
}

/// NMI with arithmetic normalization from empirical probabilities.
pub fn nmi_probabilities(y: &[usize], c: &[usize]) -> f64 {
    let n = y.len() as f64;
    let ky = y.iter().max().unwrap() + 1;
    let kc = c.iter().max().unwrap() + 1;
    let p_y: Vec<f64> = (0..ky)
        .map(|a| y.iter().filter(|&&v| v == a).count() as f64 / n)
        .collect();
    let p_c: Vec<f64> = (0..kc)
        .map(|b| c.iter().filter(|&&v| v == b).count() as f64 / n)
        .collect();
    let mut mi = 0.0;
    for (a, &pa) in p_y.iter().enumerate() {
        for (b, &pb) in p_c.iter().enumerate() {
            let p = y.iter().zip(c).filter(|(&u, &v)| u == a && v == b).count() as f64 / n;
            if p > 0.0 {
                mi += p * (p / (pa * pb)).ln();
            }
        }
    }
    let h = |ps: &[f64]| {
        -ps.iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    };
    let (hy, hc) = (h(&p_y), h(&p_c));
    if hy + hc == 0.0 {
        return 1.0;
    }
    (2.0 * mi / (hy + hc)).clamp(0.0, 1.0)
}

pub fn purity_direct(y: &[usize], c: &[usize]) -> f64 {
    let kc = c.iter().max().unwrap() + 1;
    let ky = y.iter().max().unwrap() + 1;
    let mut total = 0;
    for b in 0..kc {
        total += (0..ky)
            .map(|a| y.iter().zip(c).filter(|(&u, &v)| u == a && v == b).count())
            .max()
            .unwrap();
    }
    total as f64 / y.len() as f64
}

/// Best one-to-one cluster/class matching by trying every permutation.
pub fn accuracy_permutations(y: &[usize], c: &[usize]) -> f64 {
    let ky = y.iter().max().unwrap() + 1;
    let kc = c.iter().max().unwrap() + 1;
    let size = ky.max(kc);
    let mut counts = vec![vec![0usize; size]; size];
    for (&a, &b) in y.iter().zip(c) {
        counts[b][a] += 1;
    }
    let mut perm: Vec<usize> = (0..size).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let s: usize = (0..size).map(|b| counts[b][p[b]]).sum();
        best = best.max(s);
    });
    best as f64 / y.len() as f64
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Smallest eigenvalue of a symmetric matrix by bisection on Sturm counts
/// of the LDLᵀ pivots (Sylvester's law of inertia).
pub fn min_eigenvalue_bisect(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let bound: f64 = (0..n)
        .map(|i| (0..n).map(|j| a[[i, j]].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let below = |shift: f64| -> usize {
        // number of eigenvalues < shift = negative pivots of A - shift I
        let mut m = a.clone();
        for i in 0..n {
            m[[i, i]] -= shift;
        }
        let mut neg = 0;
        for k in 0..n {
            let mut p = m[[k, k]];
            if p == 0.0 {
                p = -1e-300;
            }
            if p < 0.0 {
                neg += 1;
            }
            for i in (k + 1)..n {
                let f = m[[i, k]] / p;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        m[[i, j]] -= f * m[[k, j]];
                    }
                }
            }
        }
        neg
    };
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}
