use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use topo_nmf::bench::{
    emit_panels, export_metagenes, generate_blobs, load_dataset, prepare, run_benchmark,
    RankPolicy, RunSpec, SigmaPolicy, ZetaMode,
};
use topo_nmf::data::{write_dense_csv, write_labels, MatrixFormat};
use topo_nmf::eval::SampleRow;
use topo_nmf::nmf::{factorize, nndsvda_init, MethodConfig, Variant};
use topo_nmf::{Error, Result};

#[derive(Parser)]
#[command(
    name = "topo-nmf",
    version,
    about = "Persistent-Laplacian regularized NMF benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load, filter and normalize a dataset and cache the result.
    Prep(PrepArgs),
    /// Run the clustering benchmark.
    Run(RunArgs),
    /// Run the benchmark with every binary filtration weight vector.
    Sweep(RunArgs),
    /// Factorize and write the meta-gene matrix H.
    Export(ExportArgs),
    /// Draw RS scatter panels from a per-sample scores file.
    Plot(PlotArgs),
    /// Write a synthetic Gaussian-blob dataset.
    Blobs(BlobArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Expression matrix, genes by cells.
    #[arg(long)]
    data: Option<PathBuf>,
    /// One label per line, in cell order.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Defaults to a guess from the file extension.
    #[arg(long, value_enum)]
    format: Option<MatrixFormat>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON run spec; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    /// Repeatable; defaults to all eight methods.
    #[arg(long = "method")]
    methods: Vec<Variant>,
    /// `classes`, `sqrt` or an integer.
    #[arg(long)]
    rank: Option<RankPolicy>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    knn: Option<usize>,
    #[arg(long)]
    filtrations: Option<usize>,
    /// Comma-separated weights, `lower-half` or `sweep`.
    #[arg(long)]
    zeta: Option<ZetaMode>,
    /// `auto` or a positive number.
    #[arg(long)]
    sigma: Option<SigmaPolicy>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// k-means clusters when no labels are given.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write RS plots per method.
    #[arg(long)]
    plots: bool,
    /// Also write the graph adjacency of each method in COO form.
    #[arg(long)]
    dump_graphs: bool,
}

#[derive(Args)]
struct PrepArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Minimum cells per class; 0 disables the filter.
    #[arg(long, default_value_t = topo_nmf::data::DEFAULT_MIN_CELLS)]
    min_cells: usize,
    /// Keep only genes nonzero in at least this many cells.
    #[arg(long)]
    min_gene_cells: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "TNMF")]
    method: Variant,
    #[arg(long, default_value = "sqrt")]
    rank: RankPolicy,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 8)]
    knn: usize,
    #[arg(long, default_value_t = 8)]
    filtrations: usize,
    #[arg(long, default_value = "lower-half")]
    zeta: ZetaMode,
    #[arg(long, default_value = "auto")]
    sigma: SigmaPolicy,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Per-sample scores CSV written by `run`.
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BlobArgs {
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 50)]
    per_class: usize,
    #[arg(long, default_value_t = 30)]
    dim: usize,
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

impl RunArgs {
    fn into_spec(self, force_sweep: bool) -> Result<RunSpec> {
        let mut spec = match &self.config {
            Some(p) => RunSpec::from_file(p)?,
            None => RunSpec::default(),
        };
        if let Some(v) = self.data.data {
            spec.data = Some(v);
        }
        if let Some(v) = self.data.labels {
            spec.labels = Some(v);
        }
        if let Some(v) = self.data.format {
            spec.format = Some(v);
        }
        if !self.methods.is_empty() {
            spec.methods = self.methods;
        }
        if let Some(v) = self.rank {
            spec.rank = v;
        }
        if let Some(v) = self.lambda {
            spec.lambda = v;
        }
        if let Some(v) = self.knn {
            spec.knn = v;
        }
        if let Some(v) = self.filtrations {
            spec.filtrations = v;
        }
        if let Some(v) = self.zeta {
            spec.zeta = v;
        }
        if let Some(v) = self.sigma {
            spec.sigma = v;
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.max_iters {
            spec.max_iters = v;
        }
        if let Some(v) = self.clusters {
            spec.clusters = Some(v);
        }
        if let Some(v) = self.out {
            spec.out = v;
        }
        spec.plots |= self.plots;
        spec.dump_graphs |= self.dump_graphs;
        if force_sweep {
            spec.zeta = ZetaMode::Sweep;
        }
        Ok(spec)
    }
}

fn data_spec(args: DataArgs) -> RunSpec {
    RunSpec {
        data: args.data,
        labels: args.labels,
        format: args.format,
        ..RunSpec::default()
    }
}

fn prep(args: PrepArgs) -> Result<()> {
    let mut spec = data_spec(args.data);
    spec.preprocessing.min_cells_per_class = (args.min_cells > 0).then_some(args.min_cells);
    spec.preprocessing.min_cells_per_gene = args.min_gene_cells;
    let (x, labels) = load_dataset(&spec)?;
    let prepared = prepare(x, labels, &spec.preprocessing)?;
    std::fs::create_dir_all(&args.out)?;
    let x = &prepared.x;
    write_dense_csv(
        &args.out.join("matrix.csv"),
        x.values(),
        x.gene_ids(),
        x.cell_ids(),
    )?;
    if let Some(y) = &prepared.labels {
        write_labels(&args.out.join("labels.txt"), y)?;
    }
    let meta = serde_json::json!({
        "source": spec.data,
        "preprocessing": prepared.steps,
        "genes": x.n_genes(),
        "cells": x.n_cells(),
    });
    std::fs::write(
        args.out.join("prep.json"),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;
    println!(
        "{} genes x {} cells -> {}",
        x.n_genes(),
        x.n_cells(),
        args.out.display()
    );
    Ok(())
}

fn run(args: RunArgs, sweep: bool) -> Result<()> {
    let spec = args.into_spec(sweep)?;
    let result = run_benchmark(&spec)?;
    result.write_outputs(&spec.out)?;
    for row in &result.table.rows {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"));
        println!(
            "{:<8} ari {} nmi {} purity {} acc {} iters {:>4} zeta [{}]",
            row.method,
            fmt(row.ari),
            fmt(row.nmi),
            fmt(row.purity),
            fmt(row.accuracy),
            row.iterations,
            row.zeta
        );
    }
    println!("results in {}", spec.out.display());
    Ok(())
}

fn export(args: ExportArgs) -> Result<()> {
    let spec = RunSpec {
        methods: vec![args.method],
        rank: args.rank,
        lambda: args.lambda,
        knn: args.knn,
        filtrations: args.filtrations,
        zeta: args.zeta,
        sigma: args.sigma,
        ..data_spec(args.data)
    };
    if spec.zeta.is_sweep() {
        return Err(Error::Config(
            "export needs fixed filtration weights".into(),
        ));
    }
    let (x, labels) = load_dataset(&spec)?;
    let data = prepare(x, labels, &spec.preprocessing)?;
    let classes = data.labels.as_ref().map(|y| y.num_classes());
    let rank = spec.rank.resolve(classes, data.x.n_cells())?;
    let graph = graph_for(&spec, &data.x)?;
    let mut cfg = MethodConfig::new(args.method, rank).with_lambda(spec.lambda);
    if let Some(g) = graph {
        cfg = cfg.with_graph(std::sync::Arc::new(g));
    }
    let init = nndsvda_init(&data.x, rank)?;
    let wh = factorize(&data.x, &cfg, &init)?;
    export_metagenes(&wh, data.x.cell_ids(), &args.out)?;
    println!(
        "{rank} meta-genes x {} cells -> {}",
        data.x.n_cells(),
        args.out.display()
    );
    Ok(())
}

fn graph_for(
    spec: &RunSpec,
    x: &topo_nmf::data::ExpressionMatrix,
) -> Result<Option<topo_nmf::graph::GraphRegularizer>> {
    use topo_nmf::graph::*;
    use topo_nmf::nmf::GraphKind;
    let v = spec.methods[0];
    if !v.is_regularized() {
        return Ok(None);
    }
    let d = pairwise_distances(x);
    let zeta =
        || -> Result<FiltrationWeights> { Ok(spec.zeta.candidates(spec.filtrations)?.remove(0)) };
    Ok(Some(match v.graph_kind() {
        GraphKind::HeatKernel => {
            let sigma = match spec.sigma {
                SigmaPolicy::Auto => heat_kernel_sigma(&d, spec.knn)?,
                SigmaPolicy::Value(s) => s,
            };
            heat_kernel_knn_graph(&d, spec.knn, sigma)?
        }
        GraphKind::CutoffFiltration => cutoff_persistent_laplacian(&d, &zeta()?)?,
        GraphKind::KnnFiltration => knn_persistent_laplacian(&d, &zeta()?)?,
        GraphKind::None => return Ok(None),
    }))
}

fn plot(args: PlotArgs) -> Result<()> {
    let mut r = csv::Reader::from_path(&args.scores)?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<SampleRow>, _>>()?;
    let keyed_by_truth = rows.iter().any(|r| !r.true_label.is_empty());
    let mut classes: Vec<String> = Vec::new();
    for r in &rows {
        let key = if keyed_by_truth {
            &r.true_label
        } else {
            &r.aligned_label
        };
        if !classes.contains(key) {
            classes.push(key.clone());
        }
    }
    emit_panels(&rows, &classes, &args.out)?;
    println!("{} panels -> {}", classes.len(), args.out.display());
    Ok(())
}

fn blobs(args: BlobArgs) -> Result<()> {
    let (x, y) = generate_blobs(
        args.classes,
        args.per_class,
        args.dim,
        args.separation,
        args.seed,
    )?;
    std::fs::create_dir_all(&args.out)?;
    write_dense_csv(
        &args.out.join("matrix.csv"),
        x.values(),
        x.gene_ids(),
        x.cell_ids(),
    )?;
    write_labels(&args.out.join("labels.txt"), &y)?;
    println!(
        "{} genes x {} cells -> {}",
        x.n_genes(),
        x.n_cells(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Prep(a) => prep(a),
        Command::Run(a) => run(a, false),
        Command::Sweep(a) => run(a, true),
        Command::Export(a) => export(a),
        Command::Plot(a) => plot(a),
        Command::Blobs(a) => blobs(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
