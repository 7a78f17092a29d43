//! Experiment runner: configurations, metrics, the toy, gate and benchmark
//! experiments, and CSV / JSON / SVG report emission.

mod config;
mod experiments;
mod metrics;
mod report;
pub mod svg;

pub use config::{ExperimentConfig, ExperimentId};
pub use experiments::{
    experiment_dataset, idx_paths, load_benchmark_data, run_activation_benchmark, run_gate_experiment,
    run_network, run_toy_experiment, RunOutput,
};
pub use metrics::ConfusionMatrix;
pub use report::{
    emit_benchmark, emit_report, BenchmarkReport, ExperimentReport, GateSummary, ReportFormat,
};
