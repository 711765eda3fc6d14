//! Nonnegative matrix factorization regularized by persistent graph
//! Laplacians, together with the baselines it is compared against and the
//! clustering-evaluation pipeline used to score the reduced representation.
//!
//! The crate is organised bottom-up:
//!
//! * [`data`] loads, filters and normalizes gene-by-cell expression matrices.
//! * [`graph`] builds cell-cell regularizers: the heat-kernel k-NN graph and
//!   the two persistent Laplacian constructions (distance cutoff filtration
//!   and k-NN filtration).
//! * [`nmf`] holds NNDSVDA initialization and the multiplicative-update
//!   solver for all eight method variants.
//! * [`eval`] clusters the reduced representation with k-means and scores it
//!   (ARI, NMI, purity, accuracy, R/S scores).
//! * [`bench`] wires everything into the end-to-end benchmark driven by the
//!   `topo-nmf` binary.

pub mod bench;
pub mod data;
pub mod error;
pub mod eval;
pub mod graph;
pub mod nmf;

pub use error::{Error, Result};
