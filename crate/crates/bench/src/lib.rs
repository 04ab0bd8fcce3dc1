//! Shared fixtures for the criterion benchmarks.

use std::sync::Arc;

use seqfed::data::generate_synthetic;
use seqfed::objectives::build_quadratic_group;
use seqfed::{ClientObjective, LogisticClient, TrainingConfig};

/// Clients of quadratic group `id` (panics on an unknown id).
pub fn group(id: u32) -> Vec<ClientObjective> {
    build_quadratic_group(id).expect("valid group id")
}

/// Two clients, ten local steps: the shape of the quadratic comparison.
pub fn two_client_config(rounds: usize, lr: f64) -> TrainingConfig {
    TrainingConfig::new(rounds, 2, 10, lr)
}

/// `m` logistic clients over contiguous shards of `n` synthetic samples.
pub fn logistic_clients(n: usize, dim: usize, m: usize, batch: usize) -> Vec<ClientObjective> {
    let data = Arc::new(generate_synthetic(n, dim, 0));
    let per = n / m;
    (0..m)
        .map(|i| {
            LogisticClient::new(
                Arc::clone(&data),
                (i * per..(i + 1) * per).collect(),
                1e-3,
                batch,
            )
            .into()
        })
        .collect()
}
