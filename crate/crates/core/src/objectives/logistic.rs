use std::sync::Arc;

use rand::Rng;

use crate::data::Dataset;

/// Regularised logistic loss over one client's shard.
///
/// `F(x) = (1/n) Σ −(b log h(aᵀx) + (1−b) log(1−h(aᵀx))) + ½ω‖x‖²` with the
/// sigmoid `h`. Stochastic gradients average `batch` shard samples, drawn with
/// replacement unless `replacement` is off.
#[derive(Debug, Clone)]
pub struct LogisticClient {
    pub data: Arc<Dataset>,
    pub shard: Arc<[usize]>,
    pub reg: f64,
    pub batch: usize,
    pub replacement: bool,
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + eᶻ)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LogisticClient {
    pub fn new(data: Arc<Dataset>, shard: Vec<usize>, reg: f64, batch: usize) -> Self {
        assert!(!shard.is_empty(), "logistic client with an empty shard");
        assert!(batch >= 1, "batch must be positive");
        Self {
            data,
            shard: shard.into(),
            reg,
            batch,
            replacement: true,
        }
    }

    /// Client holding every sample of `data`.
    pub fn full(data: Arc<Dataset>, reg: f64, batch: usize) -> Self {
        let n = data.len();
        Self::new(data, (0..n).collect(), reg, batch)
    }

    pub fn without_replacement(mut self) -> Self {
        self.replacement = false;
        self
    }

    pub fn dim(&self) -> usize {
        self.data.dim
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let n = self.shard.len() as f64;
        let loss: f64 = self
            .shard
            .iter()
            .map(|&i| {
                let s = &self.data.samples[i];
                let z = s.dot(x);
                softplus(z) - f64::from(s.label) * z
            })
            .sum();
        loss / n + 0.5 * self.reg * x.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.average_into(self.shard.iter().copied(), self.shard.len(), x, out);
    }

    pub fn stochastic_gradient_into<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        rng: &mut R,
        out: &mut [f64],
    ) {
        let n = self.shard.len();
        if self.replacement {
            let picks = (0..self.batch).map(|_| self.shard[rng.random_range(0..n)]);
            self.average_into(picks, self.batch, x, out);
        } else if self.batch >= n {
            self.gradient_into(x, out);
        } else {
            let mut picks = rand::seq::index::sample(rng, n, self.batch).into_vec();
            picks.sort_unstable();
            self.average_into(picks.into_iter().map(|j| self.shard[j]), self.batch, x, out);
        }
    }

    fn average_into(
        &self,
        samples: impl Iterator<Item = usize>,
        count: usize,
        x: &[f64],
        out: &mut [f64],
    ) {
        out.fill(0.0);
        for i in samples {
            let s = &self.data.samples[i];
            let r = sigmoid(s.dot(x)) - f64::from(s.label);
            for &(j, v) in &s.features {
                out[j as usize - 1] += r * v;
            }
        }
        let inv = 1.0 / count as f64;
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = *o * inv + self.reg * xi;
        }
    }

    /// `¼·λ_max((1/n)Σ aaᵀ) + ω`, bounded above via the mean squared norm.
    pub fn smoothness_upper(&self) -> f64 {
        let n = self.shard.len() as f64;
        let tr: f64 = self
            .shard
            .iter()
            .map(|&i| self.data.samples[i].norm_sq())
            .sum::<f64>()
            / n;
        0.25 * tr + self.reg
    }
}
