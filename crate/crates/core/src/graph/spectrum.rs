use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;

fn eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let (m, n) = a.dim();
    assert_eq!(m, n, "eigenvalues of a non-square matrix");
    let mat = DMatrix::from_fn(m, n, |i, j| a[[i, j]]);
    SymmetricEigen::new(mat)
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Array2<f64>) -> f64 {
    eigenvalues(a).into_iter().fold(f64::INFINITY, f64::min)
}

/// Number of eigenvalues with magnitude below `tol`. For a graph Laplacian
/// this is the number of connected components.
pub fn zero_eigenvalue_multiplicity(a: &Array2<f64>, tol: f64) -> usize {
    eigenvalues(a).into_iter().filter(|v| v.abs() < tol).count()
}
