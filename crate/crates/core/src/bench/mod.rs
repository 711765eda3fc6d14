//! Benchmark orchestration: run specs, the end-to-end pipeline, result
//! tables, meta-gene export, RS plots and the synthetic blob generator.

mod blobs;
mod export;
mod plot;
mod run;
mod spec;
mod table;

pub use blobs::generate_blobs;
pub use export::export_metagenes;
pub use plot::{emit_panels, emit_plots};
pub use run::{
    load_dataset, prepare, run_benchmark, run_benchmark_on, BenchmarkRun, MethodOutcome,
    PreparedData,
};
pub use spec::{
    sqrt_rank, MethodOverride, Preprocessing, RankPolicy, RunSpec, SigmaPolicy, ZetaMode,
};
pub use table::{MethodAverage, ResultRow, ResultTable};
