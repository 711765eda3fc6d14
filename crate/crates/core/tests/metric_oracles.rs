mod common;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use topo_nmf::data::LabelVector;
use topo_nmf::eval::{
    accuracy, ari, max_weight_assignment, nmi, purity, ClusterAssignment, ContingencyTable,
    NmiNormalization,
};

fn table(y: &[usize], c: &[usize]) -> ContingencyTable {
    ContingencyTable::from_indices(y, c).unwrap()
}

fn as_inputs(y: &[usize], c: &[usize]) -> (LabelVector, ClusterAssignment) {
    let labels = LabelVector::new(y.iter().map(|l| format!("class{l}")).collect()).unwrap();
    let k = c.iter().max().unwrap() + 1;
    let clusters = ClusterAssignment {
        labels: c.to_vec(),
        centroids: ndarray::Array2::zeros((k, 1)),
        inertia: 0.0,
    };
    (labels, clusters)
}

/// Relabels to first-appearance order so string labels map to the same
/// indices the oracles use.
fn dense(v: &[usize]) -> Vec<usize> {
    let mut seen = Vec::new();
    v.iter()
        .map(|x| match seen.iter().position(|s| s == x) {
            Some(p) => p,
            None => {
                seen.push(*x);
                seen.len() - 1
            }
        })
        .collect()
}

#[test]
fn metrics_match_brute_force() {
    let mut r = common::rng(42);
    for _ in 0..100 {
        let n = r.random_range(2..60);
        let ky = r.random_range(1..=6);
        let kc = r.random_range(1..=6);
        let y = dense(&common::random_labels(n, ky, &mut r));
        let c = dense(&common::random_labels(n, kc, &mut r));
        let t = table(&y, &c);
        assert_abs_diff_eq!(ari(&t), common::ari_pairs(&y, &c), epsilon = 1e-10);
        assert_abs_diff_eq!(
            nmi(&t, NmiNormalization::Arithmetic),
            common::nmi_probabilities(&y, &c),
            epsilon = 1e-10
        );
        let (labels, clusters) = as_inputs(&y, &c);
        let acc = accuracy(&labels, &clusters).unwrap();
        let pur = purity(&labels, &clusters).unwrap();
        assert_abs_diff_eq!(acc, common::accuracy_permutations(&y, &c), epsilon = 1e-10);
        assert_abs_diff_eq!(pur, common::purity_direct(&y, &c), epsilon = 1e-10);
        assert!(pur >= acc - 1e-15);
    }
}

#[test]
fn hungarian_matches_permutations_on_rectangles() {
    let mut r = common::rng(7);
    for _ in 0..100 {
        let rows = r.random_range(1..=6);
        let cols = r.random_range(1..=6);
        let w: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| r.random_range(0..20) as f64).collect())
            .collect();
        let assignment = max_weight_assignment(&w);
        let mut used = vec![false; cols];
        let mut total = 0.0;
        for (i, a) in assignment.iter().enumerate() {
            if let Some(j) = *a {
                assert!(!used[j]);
                used[j] = true;
                total += w[i][j];
            }
        }
        assert_eq!(assignment.iter().flatten().count(), rows.min(cols));

        let size = rows.max(cols);
        let mut perm: Vec<usize> = (0..size).collect();
        let mut best = 0.0f64;
        loop {
            let s: f64 = (0..rows)
                .filter(|&i| perm[i] < cols)
                .map(|i| w[i][perm[i]])
                .sum();
            best = best.max(s);
            if !next_permutation(&mut perm) {
                break;
            }
        }
        assert_eq!(total, best);
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[test]
fn ari_of_random_permutations_centers_on_zero() {
    let mut r = common::rng(3);
    let y: Vec<usize> = (0..100).map(|i| i % 4).collect();
    let mut mean = 0.0;
    for _ in 0..1000 {
        let mut c = y.clone();
        c.shuffle(&mut r);
        mean += ari(&table(&y, &c)) / 1000.0;
    }
    assert!(mean.abs() < 0.02, "mean ARI {mean}");
}

proptest! {
    #[test]
    fn scores_are_invariant_to_cluster_renaming(
        labels in proptest::collection::vec((0usize..4, 0usize..4), 2..50),
        shift in 1usize..4,
    ) {
        let y: Vec<usize> = dense(&labels.iter().map(|p| p.0).collect::<Vec<_>>());
        let c: Vec<usize> = labels.iter().map(|p| p.1).collect();
        let renamed: Vec<usize> = c.iter().map(|&v| (v + shift) % 4).collect();
        let (c, renamed) = (dense(&c), dense(&renamed));
        let (a, b) = (table(&y, &c), table(&y, &renamed));
        prop_assert!((ari(&a) - ari(&b)).abs() < 1e-12);
        prop_assert!((nmi(&a, NmiNormalization::Geometric) - nmi(&b, NmiNormalization::Geometric)).abs() < 1e-12);
        let n = nmi(&a, NmiNormalization::Arithmetic);
        prop_assert!((0.0..=1.0).contains(&n));
        prop_assert!(ari(&a) <= 1.0 + 1e-12);
    }

    #[test]
    fn ari_is_symmetric(labels in proptest::collection::vec((0usize..5, 0usize..5), 2..40)) {
        let y = dense(&labels.iter().map(|p| p.0).collect::<Vec<_>>());
        let c = dense(&labels.iter().map(|p| p.1).collect::<Vec<_>>());
        prop_assert!((ari(&table(&y, &c)) - ari(&table(&c, &y))).abs() < 1e-12);
    }
}
