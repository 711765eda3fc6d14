mod common;

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use ndarray::{Array2, Axis};
use proptest::prelude::*;

use topo_nmf::graph::{
    cutoff_persistent_laplacian, heat_kernel_knn_graph, heat_kernel_sigma,
    knn_persistent_laplacian, pairwise_distances, FiltrationWeights, GraphRegularizer,
};
use topo_nmf::nmf::{
    factorize, l21_norm, nndsvda_init, objective, regularization_term, FactorPair, GraphKind,
    MethodConfig, Variant,
};

fn graph_for(v: Variant, x: &topo_nmf::data::ExpressionMatrix) -> Option<Arc<GraphRegularizer>> {
    let d = pairwise_distances(x);
    let zeta = FiltrationWeights::ones(4).unwrap();
    let g = match v.graph_kind() {
        GraphKind::None => return None,
        GraphKind::HeatKernel => {
            heat_kernel_knn_graph(&d, 3, heat_kernel_sigma(&d, 3).unwrap()).unwrap()
        }
        GraphKind::CutoffFiltration => cutoff_persistent_laplacian(&d, &zeta).unwrap(),
        GraphKind::KnnFiltration => knn_persistent_laplacian(&d, &zeta).unwrap(),
    };
    Some(Arc::new(g))
}

fn config(v: Variant, rank: usize, x: &topo_nmf::data::ExpressionMatrix) -> MethodConfig {
    let cfg = MethodConfig::new(v, rank).with_rel_tol(0.0);
    match graph_for(v, x) {
        Some(g) => cfg.with_graph(g),
        None => cfg,
    }
}

#[test]
fn trace_term_matches_explicit_product() {
    let x = common::random_expression(6, 12, 1);
    let mut r = common::rng(2);
    let h = common::random_matrix(3, 12, &mut r);
    for v in [Variant::Gnmf, Variant::Tnmf, Variant::KTnmf] {
        let g = graph_for(v, &x).unwrap();
        let explicit = h.dot(&g.laplacian()).dot(&h.t()).diag().sum();
        assert_abs_diff_eq!(regularization_term(&h, &g), explicit, epsilon = 1e-10);
    }
}

#[test]
fn objective_combines_loss_and_trace() {
    let x = common::random_expression(6, 12, 3);
    let init = nndsvda_init(&x, 3).unwrap();
    for v in Variant::ALL {
        let cfg = config(v, 3, &x).with_lambda(0.7);
        let resid = x.values() - &init.w.dot(&init.h);
        let loss = if v.is_robust() {
            l21_norm(&resid)
        } else {
            resid.mapv(|a| a * a).sum()
        };
        let reg = cfg
            .graph
            .as_ref()
            .map_or(0.0, |g| 0.7 * regularization_term(&init.h, g));
        assert_abs_diff_eq!(objective(&x, &cfg, &init), loss + reg, epsilon = 1e-10);
    }
}

#[test]
fn l21_equals_weighted_trace() {
    let mut r = common::rng(9);
    for _ in 0..20 {
        let a = common::random_matrix(5, 8, &mut r);
        let q = Array2::from_diag(&a.map_axis(Axis(0), |c| 1.0 / c.dot(&c).sqrt()));
        let trace = a.dot(&q).dot(&a.t()).diag().sum();
        assert_abs_diff_eq!(trace, l21_norm(&a), epsilon = 1e-10);
    }
}

#[test]
fn zero_lambda_reduces_to_unregularized() {
    for seed in 0..3 {
        let x = common::random_expression(10, 20, seed);
        let init = nndsvda_init(&x, 3).unwrap();
        for (reg, base) in [
            (Variant::Gnmf, Variant::Nmf),
            (Variant::RGnmf, Variant::RNmf),
        ] {
            let a = factorize(
                &x,
                &config(reg, 3, &x).with_lambda(0.0).with_max_iters(50),
                &init,
            )
            .unwrap();
            let b = factorize(&x, &config(base, 3, &x).with_max_iters(50), &init).unwrap();
            let dev = (&a.w - &b.w)
                .iter()
                .chain((&a.h - &b.h).iter())
                .fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(dev < 1e-12, "{reg}: {dev}");
        }
    }
}

#[test]
fn stops_early_on_relative_tolerance() {
    let x = common::random_expression(10, 20, 4);
    let init = nndsvda_init(&x, 2).unwrap();
    let cfg = MethodConfig::new(Variant::Nmf, 2).with_rel_tol(1e-3);
    let wh = factorize(&x, &cfg, &init).unwrap();
    assert!(wh.iters_run < cfg.max_iters);
    assert_eq!(wh.objective_trace.len(), wh.iters_run + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_variant_descends(seed in 0u64..10_000, rank in 1usize..5, lambda in 0.0f64..3.0) {
        let x = common::random_expression(12, 24, seed);
        let mut r = common::rng(seed ^ 0x5eed);
        let init = FactorPair::new(
            common::random_matrix(12, rank, &mut r),
            common::random_matrix(rank, 24, &mut r),
        );
        for v in Variant::ALL {
            let cfg = config(v, rank, &x).with_lambda(lambda).with_max_iters(40);
            let wh = factorize(&x, &cfg, &init).unwrap();
            prop_assert!(wh.w.iter().chain(wh.h.iter()).all(|&a| a >= 0.0 && a.is_finite()));
            for pair in wh.objective_trace.windows(2) {
                prop_assert!(pair[1] <= pair[0] + 1e-9 * (1.0 + pair[0].abs()), "{v}: {pair:?}");
            }
        }
    }
}
