use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans, ClusterAssignment};
use super::metrics::{
    accuracy_from_table, align_labels, ari, nmi, purity_from_table, ContingencyTable,
    NmiNormalization,
};
use super::rs::{rs_scores, RsReport};
use crate::data::LabelVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub ari: f64,
    pub nmi: f64,
    pub purity: f64,
    pub accuracy: f64,
}

/// Clustering of one reduced representation and everything measured on it.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub sample_ids: Vec<String>,
    pub clustering: ClusterAssignment,
    pub truth: Option<LabelVector>,
    /// Class name each sample's cluster maps to after Hungarian alignment.
    pub aligned: Vec<Option<String>>,
    pub scores: Option<Scores>,
    /// Computed against the true classes when available, else the clusters.
    pub rs: Option<RsReport>,
}

/// One line of the per-sample scores file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub sample: String,
    pub true_label: String,
    pub cluster: usize,
    pub aligned_label: String,
    pub r_score: f64,
    pub s_score: f64,
}

impl EvalReport {
    /// Scalar summary written as JSON.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "clusters": self.clustering.num_clusters(),
            "inertia": self.clustering.inertia,
            "scores": self.scores,
            "rs": self.rs.as_ref().map(|r| serde_json::json!({
                "ri": r.ri,
                "si": r.si,
                "rsd": r.rsd,
                "rsi": r.rsi,
                "cri": r.cri,
                "csi": r.csi,
            })),
        })
    }

    pub fn sample_rows(&self) -> Vec<SampleRow> {
        (0..self.sample_ids.len())
            .map(|m| SampleRow {
                sample: self.sample_ids[m].clone(),
                true_label: self
                    .truth
                    .as_ref()
                    .map_or_else(String::new, |y| y.labels()[m].clone()),
                cluster: self.clustering.labels[m],
                aligned_label: self.aligned[m].clone().unwrap_or_default(),
                r_score: self.rs.as_ref().map_or(f64::NAN, |r| r.r_scores[m]),
                s_score: self.rs.as_ref().map_or(f64::NAN, |r| r.s_scores[m]),
            })
            .collect()
    }
}

/// Clusters the columns of `h` into `clusters` groups and scores the result
/// against `truth` when given.
pub fn evaluate(
    h: &Array2<f64>,
    sample_ids: &[String],
    truth: Option<&LabelVector>,
    clusters: usize,
    seed: u64,
    restarts: usize,
) -> Result<EvalReport> {
    if sample_ids.len() != h.ncols() {
        return Err(Error::LabelMismatch {
            labels: sample_ids.len(),
            cells: h.ncols(),
        });
    }
    let clustering = kmeans(h, clusters, seed, restarts)?;
    let (aligned, scores, rs_labels) = match truth {
        Some(y) => {
            if y.len() != h.ncols() {
                return Err(Error::LabelMismatch {
                    labels: y.len(),
                    cells: h.ncols(),
                });
            }
            let classes = y.indices();
            let table = ContingencyTable::with_shape(
                &classes,
                &clustering.labels,
                y.num_classes(),
                clustering.num_clusters(),
            )?;
            let mapping = align_labels(&table);
            let aligned = clustering
                .labels
                .iter()
                .map(|&c| mapping[c].map(|i| y.classes()[i].clone()))
                .collect();
            let scores = Scores {
                ari: ari(&table),
                nmi: nmi(&table, NmiNormalization::Arithmetic),
                purity: purity_from_table(&table),
                accuracy: accuracy_from_table(&table),
            };
            (aligned, Some(scores), classes)
        }
        None => {
            let aligned = clustering
                .labels
                .iter()
                .map(|c| Some(c.to_string()))
                .collect();
            (aligned, None, dense_relabel(&clustering.labels))
        }
    };
    let rs = match rs_scores(h, &rs_labels) {
        Ok(r) => Some(r),
        Err(e) => {
            log::warn!("R/S scores unavailable: {e}");
            None
        }
    };
    Ok(EvalReport {
        sample_ids: sample_ids.to_vec(),
        clustering,
        truth: truth.cloned(),
        aligned,
        scores,
        rs,
    })
}

/// Renumbers labels to `0..k` in first-appearance order.
fn dense_relabel(labels: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(p) => p,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect()
}

pub fn write_sample_scores(path: &Path, report: &EvalReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in report.sample_rows() {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
