use std::sync::Arc;

use super::config::{DataSource, Init, Problem};
use super::HarnessError;
use crate::data::{generate_synthetic, partition_by_labels, read_libsvm_file, Dataset};
use crate::objectives::{
    build_hard_instance, build_quadratic_group, ClientObjective, HardParams, LogisticClient,
};
use crate::rng::stream;
use crate::trainers::TrainingConfig;

/// Stream id of the partition shuffle (distinct from trainer streams).
const PARTITION_STREAM: u64 = 3 << 48;

/// Clients of a problem together with their metadata.
#[derive(Debug, Clone)]
pub struct BuiltProblem {
    pub task: String,
    pub clients: Vec<ClientObjective>,
    /// Starting point when the config says `init = auto`.
    pub default_init: Vec<f64>,
    pub is_logistic: bool,
}

impl BuiltProblem {
    pub fn dim(&self) -> usize {
        self.default_init.len()
    }

    pub fn resolve_init(&self, init: &Init) -> Result<Vec<f64>, HarnessError> {
        match init {
            Init::Auto => Ok(self.default_init.clone()),
            Init::Fill(v) => Ok(vec![*v; self.dim()]),
            Init::Vector(xs) if xs.len() == self.dim() => Ok(xs.clone()),
            Init::Vector(xs) => Err(HarnessError::Invalid(format!(
                "init has {} coordinates, problem has {}",
                xs.len(),
                self.dim()
            ))),
        }
    }
}

pub fn load_dataset(source: &DataSource) -> Result<Dataset, HarnessError> {
    match source {
        DataSource::Synthetic { n, dim, seed } => Ok(generate_synthetic(*n, *dim, *seed)),
        DataSource::Libsvm(path) => {
            if !path.exists() {
                return Err(HarnessError::Io {
                    path: path.clone(),
                    message: "dataset file not found".into(),
                });
            }
            read_libsvm_file(path).map_err(|e| HarnessError::Data {
                path: path.clone(),
                message: e.to_string(),
            })
        }
    }
}

/// Instantiates the clients of `problem` for the run shape `training`.
pub fn build_problem(
    problem: &Problem,
    training: &TrainingConfig,
) -> Result<BuiltProblem, HarnessError> {
    match problem {
        Problem::Group { id, sigma } => {
            let clients = build_quadratic_group(*id)?
                .into_iter()
                .map(|c| match c {
                    ClientObjective::Quadratic(q) if *sigma > 0.0 => q.with_noise(*sigma).into(),
                    other => other,
                })
                .collect();
            Ok(BuiltProblem {
                task: format!("group{id}"),
                clients,
                default_init: vec![0.0],
                is_logistic: false,
            })
        }
        &Problem::Hard {
            kind,
            regime,
            lambda,
            lambda0,
            lambda1,
            sigma,
            zeta,
            mu,
        } => {
            let mut p = HardParams::new(training.clients, training.local_steps, training.rounds);
            p.lambda = lambda;
            p.lambda0 = lambda0;
            p.lambda1 = lambda1;
            p.sigma = sigma;
            p.zeta = zeta;
            p.mu = mu;
            let inst = build_hard_instance(kind, regime, &p)?;
            let kind_name = match kind {
                crate::objectives::HardKind::Stochastic => "stochastic",
                crate::objectives::HardKind::Heterogeneity => "heterogeneity",
                crate::objectives::HardKind::CompositeSc => "composite",
            };
            Ok(BuiltProblem {
                task: format!("hard-{kind_name}-{regime}"),
                clients: inst.clients(),
                default_init: inst.init.clone(),
                is_logistic: false,
            })
        }
        Problem::Logistic {
            source,
            labels_per_client,
            reg,
            partition_seed,
        } => {
            let data = Arc::new(load_dataset(source)?);
            let mut rng = stream(*partition_seed, PARTITION_STREAM);
            let part = partition_by_labels(&data, training.clients, *labels_per_client, &mut rng)?;
            let clients = part
                .shards
                .into_iter()
                .map(|shard| {
                    LogisticClient::new(Arc::clone(&data), shard, *reg, training.batch).into()
                })
                .collect();
            let name = match source {
                DataSource::Synthetic { .. } => "synthetic".to_string(),
                DataSource::Libsvm(p) => p
                    .file_stem()
                    .map_or("libsvm".into(), |s| s.to_string_lossy().into_owned()),
            };
            Ok(BuiltProblem {
                task: format!("{name}-C{labels_per_client}"),
                clients,
                default_init: vec![0.0; data.dim],
                is_logistic: true,
            })
        }
    }
}
