//! Objective families: piecewise quadratics (Table-3 style groups and hard
//! lower-bound instances), multi-dimensional composites, logistic regression.

mod instances;
mod logistic;
mod quadratic;
mod stats;

use rand::Rng;
use thiserror::Error;

pub use instances::{build_hard_instance, build_quadratic_group, HardKind, HardParams, Regime};
pub use logistic::{sigmoid, LogisticClient};
pub use quadratic::QuadraticClient;
pub use stats::{heterogeneity_stats, HeterogeneityProfile, SmoothnessProfile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectiveError {
    #[error("dimension mismatch: objective has {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("quadratic group id must be in 1..=10, got {0}")]
    UnknownGroup(u32),
    #[error("unknown regime {regime:?} for {kind} instances")]
    UnknownRegime { kind: &'static str, regime: String },
    #[error("the ±ζ split needs an even number of clients, got M = {0}")]
    OddClients(usize),
    #[error("invalid instance parameters: {0}")]
    InvalidParams(String),
    #[error("x* is not a minimiser: ‖∇F(x*)‖ = {0:e}")]
    NotAMinimizer(f64),
    #[error("need at least one client")]
    NoClients,
}

/// Independent one-dimensional quadratics, one per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableClient {
    pub coords: Vec<QuadraticClient>,
}

/// A single client's objective.
#[derive(Debug, Clone)]
pub enum ClientObjective {
    Quadratic(QuadraticClient),
    Separable(SeparableClient),
    Logistic(LogisticClient),
}

impl From<QuadraticClient> for ClientObjective {
    fn from(q: QuadraticClient) -> Self {
        ClientObjective::Quadratic(q)
    }
}

impl From<LogisticClient> for ClientObjective {
    fn from(c: LogisticClient) -> Self {
        ClientObjective::Logistic(c)
    }
}

impl ClientObjective {
    pub fn dim(&self) -> usize {
        match self {
            ClientObjective::Quadratic(_) => 1,
            ClientObjective::Separable(s) => s.coords.len(),
            ClientObjective::Logistic(l) => l.dim(),
        }
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<(), ObjectiveError> {
        let expected = self.dim();
        if x.len() == expected {
            Ok(())
        } else {
            Err(ObjectiveError::Dimension {
                expected,
                got: x.len(),
            })
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        self.check_dim(x)?;
        Ok(self.value_unchecked(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        self.check_dim(x)?;
        let mut g = vec![0.0; x.len()];
        self.gradient_unchecked(x, &mut g);
        Ok(g)
    }

    pub fn stochastic_gradient<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        rng: &mut R,
    ) -> Result<Vec<f64>, ObjectiveError> {
        self.check_dim(x)?;
        let mut g = vec![0.0; x.len()];
        self.stochastic_gradient_unchecked(x, rng, &mut g);
        Ok(g)
    }

    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            ClientObjective::Quadratic(q) => q.value(x[0]),
            ClientObjective::Separable(s) => {
                s.coords.iter().zip(x).map(|(q, &xi)| q.value(xi)).sum()
            }
            ClientObjective::Logistic(l) => l.value(x),
        }
    }

    pub(crate) fn gradient_unchecked(&self, x: &[f64], out: &mut [f64]) {
        match self {
            ClientObjective::Quadratic(q) => out[0] = q.gradient(x[0]),
            ClientObjective::Separable(s) => {
                for ((o, q), &xi) in out.iter_mut().zip(&s.coords).zip(x) {
                    *o = q.gradient(xi);
                }
            }
            ClientObjective::Logistic(l) => l.gradient_into(x, out),
        }
    }

    pub(crate) fn stochastic_gradient_unchecked<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        rng: &mut R,
        out: &mut [f64],
    ) {
        match self {
            ClientObjective::Quadratic(q) => out[0] = q.stochastic_gradient(x[0], rng),
            ClientObjective::Separable(s) => {
                for ((o, q), &xi) in out.iter_mut().zip(&s.coords).zip(x) {
                    *o = q.stochastic_gradient(xi, rng);
                }
            }
            ClientObjective::Logistic(l) => l.stochastic_gradient_into(x, rng, out),
        }
    }

    /// Coordinate-wise quadratic view, if the client is quadratic.
    pub fn quadratic_coords(&self) -> Option<&[QuadraticClient]> {
        match self {
            ClientObjective::Quadratic(q) => Some(std::slice::from_ref(q)),
            ClientObjective::Separable(s) => Some(&s.coords),
            ClientObjective::Logistic(_) => None,
        }
    }
}

/// Global objective `F = (1/M) Σ F_m`.
pub fn global_value(clients: &[ClientObjective], x: &[f64]) -> Result<f64, ObjectiveError> {
    let first = clients.first().ok_or(ObjectiveError::NoClients)?;
    first.check_dim(x)?;
    let mut total = 0.0;
    for c in clients {
        total += c.value(x)?;
    }
    Ok(total / clients.len() as f64)
}

/// `∇F(x)` for the global objective.
pub fn global_gradient(clients: &[ClientObjective], x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
    let first = clients.first().ok_or(ObjectiveError::NoClients)?;
    first.check_dim(x)?;
    let mut total = vec![0.0; x.len()];
    let mut g = vec![0.0; x.len()];
    for c in clients {
        c.check_dim(x)?;
        c.gradient_unchecked(x, &mut g);
        for (t, gi) in total.iter_mut().zip(&g) {
            *t += gi;
        }
    }
    let inv = 1.0 / clients.len() as f64;
    total.iter_mut().for_each(|t| *t *= inv);
    Ok(total)
}

/// Stacked one-dimensional constructions that evolve independently.
///
/// `per_dim[d][m]` is client `m`'s objective on coordinate `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiDimInstance {
    pub per_dim: Vec<Vec<QuadraticClient>>,
    pub init: Vec<f64>,
}

impl MultiDimInstance {
    pub fn new(per_dim: Vec<Vec<QuadraticClient>>, init: Vec<f64>) -> Result<Self, ObjectiveError> {
        let m = per_dim.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(ObjectiveError::NoClients);
        }
        if per_dim.iter().any(|d| d.len() != m) {
            return Err(ObjectiveError::InvalidParams(
                "per-dimension client lists differ in length".into(),
            ));
        }
        if init.len() != per_dim.len() {
            return Err(ObjectiveError::Dimension {
                expected: per_dim.len(),
                got: init.len(),
            });
        }
        Ok(Self { per_dim, init })
    }

    pub fn dims(&self) -> usize {
        self.per_dim.len()
    }

    pub fn num_clients(&self) -> usize {
        self.per_dim[0].len()
    }

    /// Client `m`'s full objective across all coordinates.
    pub fn client(&self, m: usize) -> ClientObjective {
        let coords: Vec<QuadraticClient> = self.per_dim.iter().map(|d| d[m]).collect();
        if coords.len() == 1 {
            ClientObjective::Quadratic(coords[0])
        } else {
            ClientObjective::Separable(SeparableClient { coords })
        }
    }

    pub fn clients(&self) -> Vec<ClientObjective> {
        (0..self.num_clients()).map(|m| self.client(m)).collect()
    }

    /// Sum over coordinates of the per-coordinate client mean.
    pub fn value(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        self.check(x)?;
        Ok(self
            .per_dim
            .iter()
            .zip(x)
            .map(|(cs, &xi)| cs.iter().map(|q| q.value(xi)).sum::<f64>() / cs.len() as f64)
            .sum())
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        self.check(x)?;
        Ok(self
            .per_dim
            .iter()
            .zip(x)
            .map(|(cs, &xi)| cs.iter().map(|q| q.gradient(xi)).sum::<f64>() / cs.len() as f64)
            .collect())
    }

    fn check(&self, x: &[f64]) -> Result<(), ObjectiveError> {
        if x.len() == self.dims() {
            Ok(())
        } else {
            Err(ObjectiveError::Dimension {
                expected: self.dims(),
                got: x.len(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_mismatch_is_reported() {
        let c = ClientObjective::from(QuadraticClient::new(1.0, 1.0));
        assert_eq!(
            c.value(&[1.0, 2.0]),
            Err(ObjectiveError::Dimension {
                expected: 1,
                got: 2
            })
        );
        assert!(c.gradient(&[]).is_err());
    }

    #[test]
    fn multidim_value_is_sum_of_means() {
        let inst = MultiDimInstance::new(
            vec![
                vec![
                    QuadraticClient::new(1.0, 1.0),
                    QuadraticClient::new(1.0, -1.0),
                ],
                vec![
                    QuadraticClient::new(2.0, 0.0),
                    QuadraticClient::new(4.0, 0.0),
                ],
            ],
            vec![0.0, 0.0],
        )
        .unwrap();
        let x = [2.0, 1.0];
        // ½·4 + (1 + 2)/2 = 3.5
        assert_eq!(inst.value(&x).unwrap(), 3.5);
        assert_eq!(global_value(&inst.clients(), &x).unwrap(), 3.5);
        assert_eq!(
            inst.gradient(&x).unwrap(),
            global_gradient(&inst.clients(), &x).unwrap()
        );
    }
}
