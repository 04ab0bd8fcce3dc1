//! Sequential (SFL) and parallel (PFL) federated training loops.
//!
//! Both algorithms share one driver: per round a schedule of `S` clients is
//! drawn (or replayed), each scheduled client runs `K` local SGD steps, and
//! the server moves `x ← x − γ(x − aggregate)`. SFL chains the clients so the
//! aggregate is the last client's output; PFL starts every client from the
//! round's model and averages.

mod config;
mod local;
mod record;
mod run;
mod schedule;

use thiserror::Error;

pub use config::{Method, TrainingConfig};
pub use local::{local_sgd, DIVERGENCE_THRESHOLD};
pub use record::{Divergence, RunRecord, WeightScheme};
pub use run::{
    run, run_pfl, run_pfl_with_schedules, run_sfl, run_sfl_with_schedules, run_with_schedules,
};
pub use schedule::sample_round_schedule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("cannot sample {s} participants from {m} clients")]
    TooManyParticipants { s: usize, m: usize },
    #[error("expected {expected} clients, got {got}")]
    ClientCount { expected: usize, got: usize },
    #[error(transparent)]
    Objective(#[from] crate::objectives::ObjectiveError),
    #[error("invalid schedule for round {round}: {reason}")]
    BadSchedule { round: usize, reason: String },
    #[error("iterate diverged at local step {step}")]
    Diverged { step: usize },
    #[error("weights undefined: {0}")]
    BadWeights(String),
}
