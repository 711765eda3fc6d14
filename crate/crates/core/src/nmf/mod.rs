//! Multiplicative-update NMF and its graph / persistent-Laplacian
//! regularized variants.
//!
//! All eight variants share one solver. They differ in two ways: the
//! reconstruction loss is squared Frobenius or column-wise `l2,1`, and the
//! regularizer `Tr(H PL H^T)` uses no graph, a heat-kernel k-NN graph, a
//! cutoff-filtration persistent Laplacian or a k-NN filtration persistent
//! Laplacian.
//!
//! No normalization is applied to `W` between iterations, so the pair
//! `(W D, D^-1 H)` for a positive diagonal `D` fits the data equally well.
//! Only the regularizer pins down the scale of `H`.

mod config;
mod init;
mod solver;

pub use config::{
    GraphKind, MethodConfig, Variant, DEFAULT_EPS, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL,
};
pub use init::{nndsvda_init, truncated_svd, TruncatedSvd};
pub use solver::{factorize, l21_norm, objective, regularization_term, FactorPair};
