use ndarray::{Array1, Array2, Axis, Zip};

use super::config::MethodConfig;
use crate::data::ExpressionMatrix;
use crate::error::{Error, Result};
use crate::graph::GraphRegularizer;

/// Nonnegative factors `W` (genes × r, the meta-genes) and `H` (r × cells).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub w: Array2<f64>,
    pub h: Array2<f64>,
    /// Objective at the starting point followed by one value per completed
    /// iteration.
    pub objective_trace: Vec<f64>,
    pub iters_run: usize,
}

impl FactorPair {
    pub fn new(w: Array2<f64>, h: Array2<f64>) -> Self {
        Self {
            w,
            h,
            objective_trace: Vec::new(),
            iters_run: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.objective_trace.last().copied()
    }
}

/// Sum of column Euclidean norms.
pub fn l21_norm(a: &Array2<f64>) -> f64 {
    a.columns().into_iter().map(|c| c.dot(&c).sqrt()).sum()
}

/// `Tr(H PL H^T)`, evaluated as `1/2 sum_ij PA_ij ||h_i - h_j||^2` so it is
/// never negative.
pub fn regularization_term(h: &Array2<f64>, graph: &GraphRegularizer) -> f64 {
    let a = graph.adjacency();
    let m = h.ncols();
    let mut total = 0.0;
    for i in 0..m {
        let hi = h.column(i);
        for j in (i + 1)..m {
            let w = a[[i, j]];
            if w != 0.0 {
                let hj = h.column(j);
                let sq: f64 = hi
                    .iter()
                    .zip(hj.iter())
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum();
                total += w * sq;
            }
        }
    }
    total
}

fn residual_column_norms(x: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> Array1<f64> {
    let r = x - &w.dot(h);
    r.map_axis(Axis(0), |c| c.dot(&c).sqrt())
}

fn loss(robust: bool, x: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> f64 {
    let r = x - &w.dot(h);
    if robust {
        l21_norm(&r)
    } else {
        r.iter().map(|v| v * v).sum()
    }
}

/// Objective of the configured variant at `(W, H)`.
pub fn objective(x: &ExpressionMatrix, cfg: &MethodConfig, wh: &FactorPair) -> f64 {
    objective_raw(x.values(), cfg, &wh.w, &wh.h)
}

fn objective_raw(x: &Array2<f64>, cfg: &MethodConfig, w: &Array2<f64>, h: &Array2<f64>) -> f64 {
    let mut f = loss(cfg.variant.is_robust(), x, w, h);
    let lambda = cfg.effective_lambda();
    if lambda != 0.0 {
        if let Some(g) = &cfg.graph {
            f += lambda * regularization_term(h, g);
        }
    }
    f
}

/// `1 / max(||x_j - W h_j||, eps)` per column.
fn robust_weights(x: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>, eps: f64) -> Array1<f64> {
    residual_column_norms(x, w, h).mapv(|r| 1.0 / r.max(eps))
}

fn scale_columns(a: &Array2<f64>, q: &Array1<f64>) -> Array2<f64> {
    a * &q.view().insert_axis(Axis(0))
}

fn multiplicative_step(
    target: &mut Array2<f64>,
    numer: &Array2<f64>,
    denom: &Array2<f64>,
    eps: f64,
) {
    Zip::from(target)
        .and(numer)
        .and(denom)
        .for_each(|t, &n, &d| *t *= n / (d + eps));
}

fn update_w(x: &Array2<f64>, w: &mut Array2<f64>, h: &Array2<f64>, robust: bool, eps: f64) {
    let (numer, denom) = if robust {
        let q = robust_weights(x, w, h, eps);
        let hq_t = scale_columns(h, &q).reversed_axes();
        (x.dot(&hq_t), w.dot(&h.dot(&hq_t)))
    } else {
        let h_t = h.t();
        (x.dot(&h_t), w.dot(&h.dot(&h_t)))
    };
    multiplicative_step(w, &numer, &denom, eps);
}

fn update_h(x: &Array2<f64>, w: &Array2<f64>, h: &mut Array2<f64>, cfg: &MethodConfig) {
    let eps = cfg.eps;
    let wt = w.t();
    let (mut numer, mut denom) = if cfg.variant.is_robust() {
        let q = robust_weights(x, w, h, eps);
        (
            scale_columns(&wt.dot(x), &q),
            scale_columns(&wt.dot(w).dot(&*h), &q),
        )
    } else {
        (wt.dot(x), wt.dot(w).dot(&*h))
    };

    let lambda = cfg.effective_lambda();
    if lambda != 0.0 {
        let graph = cfg
            .graph
            .as_ref()
            .expect("validated: regularized variant has a graph");
        // the l2,1 surrogate halves the loss gradient, hence 2 lambda
        let coeff = if cfg.variant.is_robust() {
            2.0 * lambda
        } else {
            lambda
        };
        numer.scaled_add(coeff, &h.dot(graph.adjacency()));
        denom.scaled_add(coeff, &scale_columns(h, graph.degree()));
    }
    multiplicative_step(h, &numer, &denom, eps);
}

fn all_finite(a: &Array2<f64>) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Runs the variant's multiplicative updates from `init`.
///
/// One iteration updates `W` and then `H`. For the `l2,1` variants the
/// column weights `Q` are refreshed from the current residual before each of
/// the two half-steps. Iteration stops when the relative objective change
/// drops below `cfg.rel_tol` or after `cfg.max_iters` iterations.
pub fn factorize(
    x: &ExpressionMatrix,
    cfg: &MethodConfig,
    init: &FactorPair,
) -> Result<FactorPair> {
    let xv = x.values();
    let (n, m) = xv.dim();
    cfg.validate(m)?;
    if init.w.dim() != (n, cfg.rank) || init.h.dim() != (cfg.rank, m) {
        return Err(Error::Dimension(format!(
            "init W {:?} and H {:?} do not fit a {n} x {m} matrix at rank {}",
            init.w.dim(),
            init.h.dim(),
            cfg.rank
        )));
    }

    let mut w = init.w.clone();
    let mut h = init.h.clone();
    let robust = cfg.variant.is_robust();
    let mut trace = Vec::with_capacity(cfg.max_iters + 1);
    let mut current = objective_raw(xv, cfg, &w, &h);
    if !current.is_finite() {
        return Err(Error::NonFinite { iteration: 0 });
    }
    trace.push(current);

    let mut iters = 0;
    while iters < cfg.max_iters {
        update_w(xv, &mut w, &h, robust, cfg.eps);
        update_h(xv, &w, &mut h, cfg);
        iters += 1;
        if !all_finite(&w) || !all_finite(&h) {
            return Err(Error::NonFinite { iteration: iters });
        }
        debug_assert!(w.iter().chain(h.iter()).all(|v| *v >= 0.0));

        let next = objective_raw(xv, cfg, &w, &h);
        if !next.is_finite() {
            return Err(Error::NonFinite { iteration: iters });
        }
        trace.push(next);
        let change = (current - next).abs() / (1.0 + next.abs());
        current = next;
        if change < cfg.rel_tol {
            break;
        }
    }

    Ok(FactorPair {
        w,
        h,
        objective_trace: trace,
        iters_run: iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pairwise_distances, GraphRegularizer};
    use crate::nmf::{MethodConfig, Variant};
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        Array2::from_shape_fn((rows, cols), |_| rng.random_range(0.1..1.0))
    }

    #[test]
    fn l21_examples() {
        assert_eq!(l21_norm(&array![[3.0], [4.0]]), 5.0);
        assert_eq!(l21_norm(&Array2::zeros((3, 2))), 0.0);
        assert_eq!(l21_norm(&array![[3.0, 0.0], [4.0, 1.0]]), 6.0);
    }

    #[test]
    fn objective_examples() {
        let x = ExpressionMatrix::from_values(array![[1.0, 3.0]]).unwrap();
        let f = FactorPair::new(array![[1.0]], array![[0.0, 0.0]]);
        assert_eq!(objective(&x, &MethodConfig::new(Variant::Nmf, 1), &f), 10.0);
        let f = FactorPair::new(array![[1.0]], array![[1.0, 3.0]]);
        assert_eq!(objective(&x, &MethodConfig::new(Variant::Nmf, 1), &f), 0.0);
        assert_eq!(objective(&x, &MethodConfig::new(Variant::RNmf, 1), &f), 0.0);
    }

    #[test]
    fn constant_columns_have_zero_penalty() {
        let g = GraphRegularizer::from_adjacency(array![
            [0.0, 2.0, 0.5],
            [2.0, 0.0, 1.0],
            [0.5, 1.0, 0.0]
        ])
        .unwrap();
        let h = array![[1.5, 1.5, 1.5], [0.2, 0.2, 0.2]];
        assert_eq!(regularization_term(&h, &g), 0.0);
        // and agrees with the trace form on a generic H
        let h = array![[1.0, 2.0, 0.5], [0.3, 0.0, 4.0]];
        let tr = h.dot(&g.laplacian()).dot(&h.t()).diag().sum();
        assert!((regularization_term(&h, &g) - tr).abs() < 1e-12);
    }

    #[test]
    fn exact_factorization_is_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = random(6, 2, &mut rng);
        let h = random(2, 9, &mut rng);
        let x = ExpressionMatrix::from_values(w.dot(&h)).unwrap();
        let init = FactorPair::new(w.clone(), h.clone());

        // the stabilizer moves the fixed point by O(eps)
        let cfg = MethodConfig::new(Variant::Nmf, 2)
            .with_max_iters(20)
            .with_rel_tol(0.0);
        let out = factorize(&x, &cfg, &init).unwrap();
        assert!(out.final_objective().unwrap() < 1e-16);

        let mut exact = cfg.clone();
        exact.eps = f64::MIN_POSITIVE;
        let out = factorize(&x, &exact, &init).unwrap();
        assert!(out.final_objective().unwrap() < 1e-24);
        for (a, b) in out.w.iter().zip(w.iter()).chain(out.h.iter().zip(h.iter())) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gnmf_with_zero_lambda_matches_nmf() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = ExpressionMatrix::from_values(random(8, 12, &mut rng)).unwrap();
        let init = FactorPair::new(random(8, 3, &mut rng), random(3, 12, &mut rng));
        let d = pairwise_distances(&x);
        let g = Arc::new(crate::graph::heat_kernel_knn_graph(&d, 3, 1.0).unwrap());
        for (plain, reg) in [
            (Variant::Nmf, Variant::Gnmf),
            (Variant::RNmf, Variant::RGnmf),
        ] {
            let a = factorize(&x, &MethodConfig::new(plain, 3).with_max_iters(30), &init).unwrap();
            let cfg = MethodConfig::new(reg, 3)
                .with_max_iters(30)
                .with_lambda(0.0)
                .with_graph(g.clone());
            let b = factorize(&x, &cfg, &init).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dimension_and_graph_errors() {
        let x = ExpressionMatrix::from_values(array![[1.0, 2.0, 3.0]]).unwrap();
        let init = FactorPair::new(array![[1.0]], array![[1.0, 1.0]]);
        assert!(matches!(
            factorize(&x, &MethodConfig::new(Variant::Nmf, 1), &init),
            Err(Error::Dimension(_))
        ));
        let init = FactorPair::new(array![[1.0]], array![[1.0, 1.0, 1.0]]);
        assert!(factorize(&x, &MethodConfig::new(Variant::Gnmf, 1), &init).is_err());
    }

    #[test]
    fn non_finite_reports_iteration() {
        let x = ExpressionMatrix::from_values(array![[1e300, 1e300], [1e300, 1e300]]).unwrap();
        let init = FactorPair::new(array![[1e300], [1e300]], array![[1e300, 1e300]]);
        let cfg = MethodConfig::new(Variant::Nmf, 1);
        assert!(matches!(
            factorize(&x, &cfg, &init),
            Err(Error::NonFinite { .. })
        ));
    }
}
