use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::spec::{RunSpec, SigmaPolicy};
use super::table::{ResultRow, ResultTable};
use crate::data::{
    filter_low_abundance_genes, filter_rare_classes, load_labels, load_matrix, log_normalize,
    unit_scale_columns, write_coo, write_dense_csv, ExpressionMatrix, LabelVector, MatrixFormat,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate, write_sample_scores, EvalReport};
use crate::graph::{
    cutoff_persistent_laplacian, heat_kernel_knn_graph, heat_kernel_sigma,
    knn_persistent_laplacian, pairwise_distances, DistanceMatrix, FiltrationWeights,
    GraphRegularizer,
};
use crate::nmf::{factorize, nndsvda_init, FactorPair, GraphKind, MethodConfig, Variant};

/// Preprocessed input shared by every method of a run.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub x: ExpressionMatrix,
    pub labels: Option<LabelVector>,
    /// Steps applied, in order.
    pub steps: Vec<String>,
}

/// Reads the matrix and optional labels named in `spec`.
pub fn load_dataset(spec: &RunSpec) -> Result<(ExpressionMatrix, Option<LabelVector>)> {
    let path = spec
        .data
        .as_deref()
        .ok_or_else(|| Error::Config("no data file given".into()))?;
    let format = match spec.format {
        Some(f) => f,
        None => MatrixFormat::from_extension(path).ok_or_else(|| {
            Error::Config(format!(
                "cannot infer the format of {}; pass one",
                path.display()
            ))
        })?,
    };
    let x = load_matrix(path, format)?;
    let labels = spec.labels.as_deref().map(load_labels).transpose()?;
    if let Some(y) = &labels {
        y.check_matches(&x)?;
    }
    Ok((x, labels))
}

/// Class filter, then gene filter, log transform and unit scaling, each as
/// enabled in `spec`.
pub fn prepare(
    x: ExpressionMatrix,
    labels: Option<LabelVector>,
    spec: &super::spec::Preprocessing,
) -> Result<PreparedData> {
    let mut steps = Vec::new();
    let (mut x, labels) = match (labels, spec.min_cells_per_class) {
        (Some(y), Some(min)) => {
            let (x, y) = filter_rare_classes(&x, &y, min)?;
            steps.push(format!("filter_rare_classes(min_cells={min})"));
            (x, Some(y))
        }
        (labels, _) => (x, labels),
    };
    if let Some(min) = spec.min_cells_per_gene {
        x = filter_low_abundance_genes(&x, min)?;
        steps.push(format!("filter_low_abundance_genes(min_cells={min})"));
    }
    if spec.log {
        x = log_normalize(&x)?;
        steps.push("log1p".into());
    }
    if spec.unit_scale {
        x = unit_scale_columns(&x)?;
        steps.push("unit_scale_columns".into());
    }
    Ok(PreparedData { x, labels, steps })
}

/// Final state of one method after zeta selection.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub variant: Variant,
    pub zeta: Option<FiltrationWeights>,
    pub lambda: f64,
    pub factors: FactorPair,
    pub report: EvalReport,
    pub graph: Option<Arc<GraphRegularizer>>,
    pub row: ResultRow,
}

#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    pub spec: RunSpec,
    pub data: PreparedData,
    pub rank: usize,
    pub clusters: usize,
    pub sigma: Option<f64>,
    pub table: ResultTable,
    /// Every evaluated candidate when sweeping, in method then mask order.
    pub sweep: Vec<ResultRow>,
    pub methods: Vec<MethodOutcome>,
}

/// Loads the data named in `spec` and runs the benchmark.
pub fn run_benchmark(spec: &RunSpec) -> Result<BenchmarkRun> {
    let (x, labels) = load_dataset(spec)?;
    run_benchmark_on(spec, x, labels)
}

/// Runs every configured method on in-memory data.
pub fn run_benchmark_on(
    spec: &RunSpec,
    x: ExpressionMatrix,
    labels: Option<LabelVector>,
) -> Result<BenchmarkRun> {
    if spec.methods.is_empty() {
        return Err(Error::Config("no methods configured".into()));
    }
    let data = prepare(x, labels, &spec.preprocessing)?;
    let classes = data.labels.as_ref().map(LabelVector::num_classes);
    let clusters = classes.or(spec.clusters).ok_or_else(|| {
        Error::Config("without labels the number of clusters must be given".into())
    })?;
    let rank = spec
        .rank
        .resolve(classes.or(spec.clusters), data.x.n_cells())?;
    log::info!(
        "{} genes x {} cells after {:?}; rank {rank}, {clusters} clusters",
        data.x.n_genes(),
        data.x.n_cells(),
        data.steps
    );

    let distances = pairwise_distances(&data.x);
    let init = nndsvda_init(&data.x, rank)?;

    let needs_heat = spec
        .methods
        .iter()
        .any(|v| v.graph_kind() == GraphKind::HeatKernel);
    let (sigma, heat) = if needs_heat {
        let sigma = match spec.sigma {
            SigmaPolicy::Auto => heat_kernel_sigma(&distances, spec.knn)?,
            SigmaPolicy::Value(s) => s,
        };
        let g = heat_kernel_knn_graph(&distances, spec.knn, sigma)?;
        (Some(sigma), Some(Arc::new(g)))
    } else {
        (None, None)
    };

    let ctx = Context {
        spec,
        dataset: spec.dataset_name(),
        data: &data,
        distances: &distances,
        init: &init,
        heat,
        rank,
        clusters,
    };

    let per_method: Vec<(MethodOutcome, Vec<ResultRow>)> = spec
        .methods
        .par_iter()
        .map(|&v| {
            ctx.run_method(v)
                .map_err(|e| e.in_run(format!("{}/{v}", ctx.dataset)))
        })
        .collect::<Result<_>>()?;

    let mut methods = Vec::with_capacity(per_method.len());
    let mut sweep = Vec::new();
    for (outcome, candidates) in per_method {
        if spec.zeta.is_sweep() && outcome.variant.is_topological() {
            sweep.extend(candidates);
        }
        methods.push(outcome);
    }
    let table = ResultTable::new(methods.iter().map(|m| m.row.clone()).collect());
    Ok(BenchmarkRun {
        spec: spec.clone(),
        data,
        rank,
        clusters,
        sigma,
        table,
        sweep,
        methods,
    })
}

struct Context<'a> {
    spec: &'a RunSpec,
    dataset: String,
    data: &'a PreparedData,
    distances: &'a DistanceMatrix,
    init: &'a FactorPair,
    heat: Option<Arc<GraphRegularizer>>,
    rank: usize,
    clusters: usize,
}

impl Context<'_> {
    fn method_config(&self, v: Variant) -> MethodConfig {
        let o = self.spec.overrides.get(&v).cloned().unwrap_or_default();
        let mut cfg = MethodConfig::new(v, self.rank)
            .with_lambda(o.lambda.unwrap_or(self.spec.lambda))
            .with_max_iters(o.max_iters.unwrap_or(self.spec.max_iters))
            .with_rel_tol(o.rel_tol.unwrap_or(self.spec.rel_tol));
        cfg.eps = self.spec.eps;
        cfg.seed = self.spec.seed;
        cfg
    }

    fn run_method(&self, v: Variant) -> Result<(MethodOutcome, Vec<ResultRow>)> {
        let zetas: Vec<Option<FiltrationWeights>> = if v.is_topological() {
            self.spec
                .zeta
                .candidates(self.spec.filtrations)?
                .into_iter()
                .map(Some)
                .collect()
        } else {
            vec![None]
        };
        let labelled = self.data.labels.is_some();
        let (rows, best) = zetas
            .into_par_iter()
            .enumerate()
            .map(|(i, z)| {
                let key = z
                    .as_ref()
                    .map_or_else(String::new, |z| format!(" zeta={z}"));
                self.run_candidate(v, z)
                    .map(|o| (vec![o.row.clone()], Some((i, o))))
                    .map_err(|e| e.in_run(format!("{v}{key}")))
            })
            .try_reduce(
                || (Vec::new(), None),
                |(mut rows_a, best_a), (rows_b, best_b)| {
                    rows_a.extend(rows_b);
                    let best = match (best_a, best_b) {
                        (Some(a), Some(b)) => Some(if better(&b, &a, labelled) { b } else { a }),
                        (a, b) => a.or(b),
                    };
                    Ok((rows_a, best))
                },
            )?;
        let (_, best) = best.expect("at least one candidate");
        Ok((best, rows))
    }

    fn graph_for(
        &self,
        v: Variant,
        zeta: Option<&FiltrationWeights>,
    ) -> Result<Option<Arc<GraphRegularizer>>> {
        Ok(match (v.graph_kind(), zeta) {
            (GraphKind::None, _) => None,
            (GraphKind::HeatKernel, _) => self.heat.clone(),
            (GraphKind::CutoffFiltration, Some(z)) => {
                Some(Arc::new(cutoff_persistent_laplacian(self.distances, z)?))
            }
            (GraphKind::KnnFiltration, Some(z)) => {
                Some(Arc::new(knn_persistent_laplacian(self.distances, z)?))
            }
            (_, None) => unreachable!("topological methods always get weights"),
        })
    }

    fn run_candidate(&self, v: Variant, zeta: Option<FiltrationWeights>) -> Result<MethodOutcome> {
        let graph = self.graph_for(v, zeta.as_ref())?;
        let mut cfg = self.method_config(v);
        if let Some(g) = &graph {
            cfg = cfg.with_graph(Arc::clone(g));
        }
        let start = Instant::now();
        let factors = factorize(&self.data.x, &cfg, self.init)?;
        let wall_time = start.elapsed().as_secs_f64();
        let report = evaluate(
            &factors.h,
            self.data.x.cell_ids(),
            self.data.labels.as_ref(),
            self.clusters,
            self.spec.seed,
            self.spec.kmeans_restarts,
        )?;
        let scores = report.scores;
        let row = ResultRow {
            dataset: self.dataset.clone(),
            method: v.name().to_owned(),
            zeta: zeta.as_ref().map_or_else(String::new, ToString::to_string),
            ari: scores.map(|s| s.ari),
            nmi: scores.map(|s| s.nmi),
            purity: scores.map(|s| s.purity),
            accuracy: scores.map(|s| s.accuracy),
            objective: factors.final_objective().unwrap_or(f64::NAN),
            iterations: factors.iters_run,
            inertia: report.clustering.inertia,
            wall_time,
        };
        Ok(MethodOutcome {
            variant: v,
            zeta,
            lambda: cfg.effective_lambda(),
            factors,
            report,
            graph,
            row,
        })
    }
}

/// Whether candidate `a` beats `b`: higher ARI with labels, lower k-means
/// inertia without. Exact ties go to the earlier candidate.
fn better(a: &(usize, MethodOutcome), b: &(usize, MethodOutcome), labelled: bool) -> bool {
    let key = |o: &MethodOutcome| {
        if labelled {
            -o.row.ari.unwrap_or(f64::NEG_INFINITY)
        } else {
            o.row.inertia
        }
    };
    match key(&a.1).total_cmp(&key(&b.1)) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.0 < b.0,
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    method: &'a str,
    zeta: &'a str,
    lambda: f64,
    rank: usize,
    iterations: usize,
    final_objective: f64,
    max_iters: usize,
    rel_tol: f64,
    eps: f64,
    report: serde_json::Value,
}

impl BenchmarkRun {
    /// Run configuration and outcomes, without wall times.
    pub fn metadata(&self) -> serde_json::Value {
        let runs: Vec<RunRecord<'_>> = self
            .methods
            .iter()
            .map(|m| {
                let o = self
                    .spec
                    .overrides
                    .get(&m.variant)
                    .cloned()
                    .unwrap_or_default();
                RunRecord {
                    method: &m.row.method,
                    zeta: &m.row.zeta,
                    lambda: m.lambda,
                    rank: m.factors.rank(),
                    iterations: m.factors.iters_run,
                    final_objective: m.row.objective,
                    max_iters: o.max_iters.unwrap_or(self.spec.max_iters),
                    rel_tol: o.rel_tol.unwrap_or(self.spec.rel_tol),
                    eps: self.spec.eps,
                    report: m.report.summary_json(),
                }
            })
            .collect();
        serde_json::json!({
            "dataset": self.spec.dataset_name(),
            "config": self.spec,
            "preprocessing": self.data.steps,
            "genes": self.data.x.n_genes(),
            "cells": self.data.x.n_cells(),
            "classes": self.data.labels.as_ref().map(|y| y.classes().to_vec()),
            "rank": self.rank,
            "clusters": self.clusters,
            "sigma": self.sigma,
            "zeta_selection": if self.data.labels.is_some() { "max-ari" } else { "min-inertia" },
            "threads": rayon::current_num_threads(),
            "runs": runs,
        })
    }

    /// Writes the result table, timings, metadata and per-method files
    /// under `out`.
    pub fn write_outputs(&self, out: &Path) -> Result<()> {
        fs::create_dir_all(out)?;
        self.table.write_csv(&out.join("results.csv"))?;
        self.table.write_timings(&out.join("timings.csv"))?;
        if self.spec.zeta.is_sweep() {
            ResultTable::new(self.sweep.clone()).write_csv(&out.join("sweep.csv"))?;
        }
        fs::write(
            out.join("metadata.json"),
            serde_json::to_string_pretty(&self.metadata())? + "\n",
        )?;

        for dir in ["scores", "factors", "traces"] {
            fs::create_dir_all(out.join(dir))?;
        }
        let cells = self.data.x.cell_ids();
        for m in &self.methods {
            let name = m.variant.name();
            write_sample_scores(&out.join("scores").join(format!("{name}.csv")), &m.report)?;
            let factors: Vec<String> = (0..m.factors.rank())
                .map(|k| format!("metagene{k}"))
                .collect();
            write_dense_csv(
                &out.join("factors").join(format!("{name}_W.csv")),
                &m.factors.w,
                self.data.x.gene_ids(),
                &factors,
            )?;
            write_dense_csv(
                &out.join("factors").join(format!("{name}_H.csv")),
                &m.factors.h,
                &factors,
                cells,
            )?;
            write_trace(
                &out.join("traces").join(format!("{name}.csv")),
                &m.factors.objective_trace,
            )?;
            if self.spec.plots {
                super::plot::emit_plots(&m.report, &out.join("plots").join(name))?;
            }
            if self.spec.dump_graphs {
                if let Some(g) = &m.graph {
                    fs::create_dir_all(out.join("graphs"))?;
                    write_coo(
                        &out.join("graphs").join(format!("{name}.coo")),
                        g.adjacency(),
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn write_trace(path: &Path, trace: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "objective"])?;
    for (i, f) in trace.iter().enumerate() {
        w.write_record([i.to_string(), f.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::spec::RankPolicy;
    use crate::bench::{generate_blobs, ZetaMode};

    fn small_spec() -> RunSpec {
        RunSpec {
            name: Some("blobs".into()),
            filtrations: 3,
            knn: 4,
            kmeans_restarts: 3,
            ..RunSpec::default()
        }
    }

    #[test]
    fn sweep_evaluates_every_binary_vector() {
        let (x, y) = generate_blobs(2, 15, 6, 10.0, 3).unwrap();
        let spec = RunSpec {
            methods: vec![Variant::Nmf, Variant::Tnmf, Variant::KrTnmf],
            zeta: ZetaMode::Sweep,
            ..small_spec()
        };
        let run = run_benchmark_on(&spec, x, Some(y)).unwrap();
        assert_eq!(run.table.rows.len(), 3);
        assert_eq!(run.sweep.len(), 2 * 7);
        for method in ["TNMF", "krTNMF"] {
            let masks: Vec<&str> = run
                .sweep
                .iter()
                .filter(|r| r.method == method)
                .map(|r| r.zeta.as_str())
                .collect();
            assert_eq!(masks.len(), 7);
            assert_eq!(masks[0], "1,0,0");
            assert_eq!(masks[6], "1,1,1");
        }
        let best_ari = run
            .sweep
            .iter()
            .filter(|r| r.method == "TNMF")
            .map(|r| r.ari.unwrap())
            .fold(f64::MIN, f64::max);
        assert_eq!(
            run.table.get("blobs", "TNMF").unwrap().ari.unwrap(),
            best_ari
        );
        assert_eq!(run.table.get("blobs", "NMF").unwrap().zeta, "");
    }

    #[test]
    fn unlabeled_runs_need_a_cluster_count() {
        let (x, _) = generate_blobs(2, 15, 6, 10.0, 3).unwrap();
        let spec = RunSpec {
            methods: vec![Variant::Nmf],
            ..small_spec()
        };
        assert!(matches!(
            run_benchmark_on(&spec, x.clone(), None),
            Err(Error::Config(_))
        ));
        let spec = RunSpec {
            clusters: Some(2),
            rank: RankPolicy::Explicit(2),
            ..spec
        };
        let run = run_benchmark_on(&spec, x, None).unwrap();
        assert!(run.table.rows[0].ari.is_none());
        assert_eq!(run.metadata()["zeta_selection"], "min-inertia");
    }

    #[test]
    fn errors_carry_the_run_key() {
        let (x, y) = generate_blobs(2, 15, 6, 10.0, 3).unwrap();
        let spec = RunSpec {
            methods: vec![Variant::KTnmf],
            filtrations: 40,
            ..small_spec()
        };
        let err = run_benchmark_on(&spec, x, Some(y)).unwrap_err();
        assert!(err.to_string().contains("kTNMF"), "{err}");
    }

    #[test]
    fn writes_expected_files() {
        let (x, y) = generate_blobs(2, 15, 6, 10.0, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let spec = RunSpec {
            methods: vec![Variant::Gnmf, Variant::KTnmf],
            plots: true,
            dump_graphs: true,
            ..small_spec()
        };
        let run = run_benchmark_on(&spec, x, Some(y)).unwrap();
        run.write_outputs(dir.path()).unwrap();
        for f in [
            "results.csv",
            "timings.csv",
            "metadata.json",
            "scores/GNMF.csv",
            "factors/kTNMF_H.csv",
            "factors/kTNMF_W.csv",
            "traces/GNMF.csv",
            "graphs/kTNMF.coo",
            "plots/GNMF",
        ] {
            assert!(dir.path().join(f).exists(), "{f} missing");
        }
        assert!(!dir.path().join("sweep.csv").exists());
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("metadata.json")).unwrap())
                .unwrap();
        assert_eq!(
            meta["preprocessing"],
            serde_json::json!([
                "filter_rare_classes(min_cells=15)",
                "log1p",
                "unit_scale_columns"
            ])
        );
        assert!(meta["sigma"].as_f64().unwrap() > 0.0);
    }
}
