//! Simulator and verification toolkit for sequential (SFL) versus parallel
//! (PFL) federated learning.
//!
//! The crate is organised bottom-up:
//!
//! * [`objectives`] — piecewise quadratic clients, hard instances, logistic loss.
//! * [`data`] — LIBSVM parsing, synthetic data, label-restricted partitioning.
//! * [`trainers`] — SFL / PFL with partial participation and server learning rate.
//! * [`bounds`] — closed-form upper and lower convergence bounds.
//! * [`lemma_oracles`] — exact combinatorial checks of the supporting lemmas.
//! * [`harness`] — configs, grid search, optimum oracles, CSV/SVG output, recipes.
//!
//! Everything is deterministic given a seed: see [`rng`].

pub mod bounds;
pub mod data;
pub mod harness;
pub mod lemma_oracles;
pub mod objectives;
pub mod rng;
pub mod trainers;

pub use bounds::{BoundParams, BoundResult, ConstantsMode, ConvexityCase, Heterogeneity, TermKind};
pub use data::{Dataset, Partition, Sample};
pub use objectives::{
    ClientObjective, HeterogeneityProfile, LogisticClient, MultiDimInstance, QuadraticClient,
    SmoothnessProfile,
};
pub use trainers::{Method, RunRecord, TrainingConfig};
