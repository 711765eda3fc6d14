//! Cell-cell graph regularizers.
//!
//! Every construction produces a [`GraphRegularizer`] holding the adjacency
//! part `PA` and degree part `PD` separately, since the multiplicative
//! updates need them split. The Laplacian is always `PL = PD - PA`.

mod distance;
mod heat;
mod persistent;
mod regularizer;
mod spectrum;

pub use distance::{pairwise_distances, pairwise_distances_of_columns, DistanceMatrix};
pub use heat::{heat_kernel_knn_graph, heat_kernel_sigma};
pub use persistent::{
    cutoff_persistent_laplacian, cutoff_radii, knn_persistent_laplacian, threshold_graph,
};
pub use regularizer::{FiltrationWeights, GraphRegularizer};
pub use spectrum::{min_eigenvalue, zero_eigenvalue_multiplicity};
