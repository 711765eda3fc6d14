use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("duplicate gene id `{0}`")]
    DuplicateGene(String),

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("label count {labels} does not match cell count {cells}")]
    LabelMismatch { labels: usize, cells: usize },

    #[error("every class has fewer than {min_cells} cells; nothing left after filtering")]
    EmptyAfterFilter { min_cells: usize },

    #[error("column {0} is all zeros and cannot be scaled to unit length")]
    ZeroColumn(usize),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value encountered at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("{key}: {source}")]
    Run {
        key: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("cannot open {}: {source}", path.display())]
    Open {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wraps an error with the key of the benchmark run that produced it.
    pub fn in_run(self, key: impl Into<String>) -> Error {
        Error::Run {
            key: key.into(),
            source: Box::new(self),
        }
    }
}
