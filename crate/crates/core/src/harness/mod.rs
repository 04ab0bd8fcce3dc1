//! Experiment orchestration: manifests, optimum oracles, grid search,
//! CSV / Markdown / SVG output and the two canned comparisons.

mod config;
mod experiment;
mod metrics;
mod oracle;
pub mod plot;
mod problem;
mod recipes;

use std::path::PathBuf;

use thiserror::Error;

use crate::data::PartitionError;
use crate::objectives::ObjectiveError;
use crate::trainers::{Method, TrainError};

pub use config::{default_lr_grid, DataSource, ExperimentConfig, Init, Problem, RawConfig, KEYS};
pub use experiment::{grid_search, run_experiment, ExperimentResult, GridOutcome, ScheduleHash};
pub use metrics::{
    csv_string, mean_min_max, render_summary, write_csv, CellSummary, MetricRow, CSV_HEADER,
};
pub use oracle::{fstar_oracle, FStar, LOGISTIC_GRAD_TOL, LOGISTIC_MAX_ITERS};
pub use problem::{build_problem, load_dataset, BuiltProblem};
pub use recipes::{
    figure2, logistic_comparison, Figure2Options, Figure2Outcome, GroupOutcome, LogisticOptions,
    LogisticOutcome, PFL_COLOR, SFL_COLOR,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Data { path: PathBuf, message: String },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("optimum oracle stopped with ‖∇F‖ = {grad_norm:e}")]
    OracleStalled { grad_norm: f64 },
    #[error("every grid cell diverged for {method}")]
    AllDiverged { method: Method },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}
