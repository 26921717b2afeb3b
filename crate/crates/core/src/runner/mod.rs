//! Sweeps, result persistence, aggregation, benchmark statistics and DOT
//! export.

mod config;
mod dot;
mod record;
mod report;
mod stats;
mod sweep;

use thiserror::Error;

use crate::policies::PolicyError;
use crate::topology::TopologyError;

pub use config::{load_config, parse_config, SweepSpec, DEFAULT_SEEDS_PER_CELL, DEFAULT_SIZES};
pub use dot::export_dot;
pub use record::{read_records, CellKey, RunRecord, RunStatus};
pub use report::{aggregate, group_name, render, CellStats, Report, ReportCell, EXCLUDED, MISSING};
pub use stats::{latency_stats, nearest_rank, LatencyStats, OutputSizeStats};
pub use sweep::{enumerate_cells, run_cell, sweep, Cell, CellOutcome};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config: {0}")]
    Config(String),
    #[error("results line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("no samples")]
    EmptySample,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}
