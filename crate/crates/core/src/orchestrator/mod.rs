//! End-to-end pipeline: scenario preparation, the two policies, metrics and sweeps.

mod metrics;
mod pipeline;
mod sweep;

pub use metrics::{compute_metrics, gain_pct, BandwidthSample, Metrics};
pub use pipeline::{
    optimizer_for, run_experiment, run_paired, run_with, Execution, ExperimentResult, Optimizer,
    OptimizerOutput, Pacs, Rtfs, Scenario,
};
pub use sweep::{
    apply, grid_csv, reference_grid, replica_seed, sweep, token_compression_grid, CellOutcome,
    CellSummary, GridCell, SweepDimension, SweepRow, SweepTable, SweepValue, GRID_COMPRESSION,
    GRID_TOKENS,
};
