//! Clustering of the reduced representation and the scores used to compare
//! a clustering against reference labels.

mod hungarian;
mod kmeans;
mod metrics;
mod report;
mod rs;

pub use hungarian::max_weight_assignment;
pub use kmeans::{kmeans, lloyd, ClusterAssignment, DEFAULT_RESTARTS, MAX_LLOYD_ITERS};
pub use metrics::{
    accuracy, align_labels, ari, contingency, nmi, purity, ContingencyTable, NmiNormalization,
};
pub use report::{evaluate, write_sample_scores, EvalReport, SampleRow};
pub use rs::{rs_scores, RsReport};
