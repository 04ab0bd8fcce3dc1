use std::fmt;
use std::str::FromStr;

use super::TrainError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Sfl,
    Pfl,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sfl => "SFL",
            Method::Pfl => "PFL",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sfl" => Ok(Method::Sfl),
            "pfl" => Ok(Method::Pfl),
            _ => Err(format!("unknown method {s:?} (expected sfl or pfl)")),
        }
    }
}

/// Parameters of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    /// Number of rounds `R`.
    pub rounds: usize,
    /// Number of clients `M`.
    pub clients: usize,
    /// Local steps per participating client, `K`.
    pub local_steps: usize,
    /// Participants per round, `S ≤ M`.
    pub participants: usize,
    /// Client learning rate `η`.
    pub client_lr: f64,
    /// Server learning rate `γ`; 1 is plain SFL / PFL.
    pub server_lr: f64,
    /// Optional cap on the L2 norm of each stochastic gradient.
    pub clip: Option<f64>,
    /// Mini-batch size used when building sample-based clients.
    pub batch: usize,
    pub seed: u64,
}

impl TrainingConfig {
    /// Full participation, `γ = 1`, no clipping, batch 1, seed 0.
    pub fn new(rounds: usize, clients: usize, local_steps: usize, client_lr: f64) -> Self {
        Self {
            rounds,
            clients,
            local_steps,
            participants: clients,
            client_lr,
            server_lr: 1.0,
            clip: None,
            batch: 1,
            seed: 0,
        }
    }

    pub fn with_participants(mut self, s: usize) -> Self {
        self.participants = s;
        self
    }

    pub fn with_server_lr(mut self, gamma: f64) -> Self {
        self.server_lr = gamma;
        self
    }

    pub fn with_clip(mut self, clip: f64) -> Self {
        self.clip = Some(clip);
        self
    }

    pub fn with_batch(mut self, batch: usize) -> Self {
        self.batch = batch;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_lr(mut self, lr: f64) -> Self {
        self.client_lr = lr;
        self
    }

    /// `γ·η·M·K` for SFL and `γ·η·K` for PFL.
    pub fn effective_lr(&self, method: Method) -> f64 {
        let per_client = self.server_lr * self.client_lr * self.local_steps as f64;
        match method {
            Method::Sfl => per_client * self.clients as f64,
            Method::Pfl => per_client,
        }
    }

    /// Server steps combined with partial participation have no convergence
    /// guarantee; runs in that setting are flagged.
    pub fn outside_theory(&self) -> bool {
        self.server_lr != 1.0 && self.participants < self.clients
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: String| Err(TrainError::InvalidConfig(msg));
        if self.rounds == 0 {
            return bad("rounds must be at least 1".into());
        }
        if self.clients == 0 {
            return bad("clients must be at least 1".into());
        }
        if self.participants == 0 {
            return bad("participants must be at least 1".into());
        }
        if self.participants > self.clients {
            return Err(TrainError::TooManyParticipants {
                s: self.participants,
                m: self.clients,
            });
        }
        if !(self.client_lr > 0.0 && self.client_lr.is_finite()) {
            return bad(format!(
                "client lr must be positive, got {}",
                self.client_lr
            ));
        }
        if !(self.server_lr >= 0.0 && self.server_lr.is_finite()) {
            return bad(format!("server lr must be ≥ 0, got {}", self.server_lr));
        }
        if let Some(c) = self.clip {
            if c.is_nan() || c <= 0.0 {
                return bad(format!("clip must be positive, got {c}"));
            }
        }
        if self.batch == 0 {
            return bad("batch must be at least 1".into());
        }
        Ok(())
    }
}
