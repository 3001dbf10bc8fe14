//! Experiment driver: configuration, Monte-Carlo runs and output files.

mod config;
mod output;
mod run;

pub use config::ExperimentConfig;
pub use output::{
    aggregate, aggregate_timings, emit_outputs, mean_stderr, median, read_results, read_timings, summarize, write_csv,
    Aggregate, RunMetadata, Summary, TimingAggregate, RESULTS_HEADER,
};
pub use run::{run_batch, run_single, runtime_vs_k, sweep_power, Axis, Outcome, ResultRow, TimingRow};
