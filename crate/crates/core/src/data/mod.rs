//! Expression matrices, their labels, file formats and preprocessing.

mod io;
mod matrix;
mod preprocess;

pub use io::{load_labels, load_matrix, write_coo, write_dense_csv, write_labels, MatrixFormat};
pub use matrix::{ExpressionMatrix, LabelVector};
pub use preprocess::{
    filter_low_abundance_genes, filter_rare_classes, log_normalize, unit_scale_columns,
    DEFAULT_MIN_CELLS,
};
