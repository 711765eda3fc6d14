use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One (dataset, method, zeta) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub method: String,
    /// Filtration weights, empty for non-topological methods.
    pub zeta: String,
    pub ari: Option<f64>,
    pub nmi: Option<f64>,
    pub purity: Option<f64>,
    pub accuracy: Option<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub inertia: f64,
    /// Seconds spent in the factorization; not written to `results.csv`.
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Serialize)]
struct TimingRow<'a> {
    dataset: &'a str,
    method: &'a str,
    zeta: &'a str,
    wall_time_s: f64,
}

/// Mean scores of one method over the datasets of a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodAverage {
    pub method: String,
    pub datasets: usize,
    pub ari: f64,
    pub nmi: f64,
    pub purity: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new(rows: Vec<ResultRow>) -> Self {
        Self { rows }
    }

    pub fn get(&self, dataset: &str, method: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset && r.method == method)
    }

    /// Writes every column except wall time, so equal runs give equal bytes.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<ResultRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn write_timings(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.rows {
            w.serialize(TimingRow {
                dataset: &row.dataset,
                method: &row.method,
                zeta: &row.zeta,
                wall_time_s: row.wall_time,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Averages each method over whatever datasets the table holds. Rows
    /// without scores are skipped; methods keep first-appearance order.
    pub fn average_by_method(&self) -> Vec<MethodAverage> {
        let mut out: Vec<(MethodAverage, usize)> = Vec::new();
        for row in &self.rows {
            let (Some(ari), Some(nmi), Some(purity), Some(accuracy)) =
                (row.ari, row.nmi, row.purity, row.accuracy)
            else {
                continue;
            };
            let idx = match out.iter().position(|(a, _)| a.method == row.method) {
                Some(i) => i,
                None => {
                    out.push((
                        MethodAverage {
                            method: row.method.clone(),
                            datasets: 0,
                            ari: 0.0,
                            nmi: 0.0,
                            purity: 0.0,
                            accuracy: 0.0,
                        },
                        0,
                    ));
                    out.len() - 1
                }
            };
            let (avg, n) = &mut out[idx];
            avg.ari += ari;
            avg.nmi += nmi;
            avg.purity += purity;
            avg.accuracy += accuracy;
            *n += 1;
        }
        out.into_iter()
            .map(|(mut a, n)| {
                let n_f = n as f64;
                a.datasets = n;
                a.ari /= n_f;
                a.nmi /= n_f;
                a.purity /= n_f;
                a.accuracy /= n_f;
                a
            })
            .collect()
    }
}
