//! Dataset ingestion, multi-seed runs, sweeps, and report emission.

mod dataset;
pub mod report;
mod run;
pub mod synth;

pub use dataset::{dataset_to_tsv, load_dataset, parse_dataset, DatasetLoadError};
pub use report::{
    emit_report, read_runs_csv, regenerate_report, ReportError, RunRow, RUNS_HEADER,
};
pub use run::{
    average_boost, cell_seed_hash, compute_boost, run, sweep, sweep_with, to_millis, CellKey,
    ExperimentError, RunResult, RunSpec, SweepProgress, SweepResult, SweepResume,
};
