use super::{Method, TrainError};

/// Where a run blew up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Divergence {
    /// Round in progress (0-based): iterate `round + 1` was never produced.
    pub round: usize,
    pub client: usize,
    pub step: usize,
}

/// Weights for the averaged iterate `x̄ = Σ w_r x⁽ʳ⁾ / Σ w_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    Uniform,
    /// `w_r = (1 − μη̃/2)^{−(r+1)}`.
    Geometric {
        mu: f64,
        eff_lr: f64,
    },
}

/// Trajectory of one run: iterates `x⁽⁰⁾ … x⁽ᴿ⁾` with their metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub iterates: Vec<Vec<f64>>,
    /// Global objective `F(x⁽ʳ⁾)`.
    pub values: Vec<f64>,
    /// `‖∇F(x⁽ʳ⁾)‖²`.
    pub grad_norms_sq: Vec<f64>,
    /// Clients visited in each round, in visiting order.
    pub schedules: Vec<Vec<usize>>,
    pub divergence: Option<Divergence>,
    /// Set when `γ ≠ 1` is combined with partial participation.
    pub outside_theory: bool,
}

impl RunRecord {
    pub fn last(&self) -> &[f64] {
        self.iterates.last().expect("a record always holds x⁽⁰⁾")
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("a record always holds F(x⁽⁰⁾)")
    }

    pub fn diverged(&self) -> bool {
        self.divergence.is_some()
    }

    /// Running minimum of `‖∇F(x⁽ʳ⁾)‖²`.
    pub fn min_grad_norms_sq(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.grad_norms_sq
            .iter()
            .map(|&g| {
                best = best.min(g);
                best
            })
            .collect()
    }

    /// `‖x⁽ʳ⁾ − x*‖` for every stored round.
    pub fn distances(&self, x_star: &[f64]) -> Vec<f64> {
        self.iterates
            .iter()
            .map(|x| {
                x.iter()
                    .zip(x_star)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Normalised weights over the stored rounds.
    pub fn weights(&self, scheme: WeightScheme) -> Result<Vec<f64>, TrainError> {
        let n = self.iterates.len();
        let raw: Vec<f64> = match scheme {
            WeightScheme::Uniform => vec![1.0; n],
            WeightScheme::Geometric { mu, eff_lr } => {
                let base = 1.0 - mu * eff_lr / 2.0;
                if !(base > 0.0 && base <= 1.0) {
                    return Err(TrainError::BadWeights(format!(
                        "1 − μη̃/2 = {base} must lie in (0, 1]"
                    )));
                }
                // w_r / w_last = base^{last − r}; avoids overflow of base^{−(r+1)}
                (0..n).map(|r| base.powi((n - 1 - r) as i32)).collect()
            }
        };
        let total: f64 = raw.iter().sum();
        Ok(raw.into_iter().map(|w| w / total).collect())
    }

    pub fn weighted_average(&self, scheme: WeightScheme) -> Result<Vec<f64>, TrainError> {
        let w = self.weights(scheme)?;
        let mut avg = vec![0.0; self.last().len()];
        for (x, wr) in self.iterates.iter().zip(&w) {
            for (a, xi) in avg.iter_mut().zip(x) {
                *a += wr * xi;
            }
        }
        Ok(avg)
    }

    /// FNV-1a digest of the schedules, for checking that paired runs replayed
    /// the same client order.
    pub fn schedule_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for b in v.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        for s in &self.schedules {
            eat(s.len() as u64);
            s.iter().for_each(|&c| eat(c as u64));
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(xs: &[f64]) -> RunRecord {
        RunRecord {
            method: Method::Sfl,
            iterates: xs.iter().map(|&x| vec![x]).collect(),
            values: xs.to_vec(),
            grad_norms_sq: vec![3.0, 1.0, 2.0][..xs.len()].to_vec(),
            schedules: vec![],
            divergence: None,
            outside_theory: false,
        }
    }

    #[test]
    fn averages() {
        let r = record(&[0.0, 3.0, 6.0]);
        assert_eq!(
            r.weighted_average(WeightScheme::Uniform).unwrap(),
            vec![3.0]
        );
        // base ½ → raw weights (¼, ½, 1)
        let g = r
            .weighted_average(WeightScheme::Geometric {
                mu: 1.0,
                eff_lr: 1.0,
            })
            .unwrap();
        assert!((g[0] - (1.5 + 6.0) / 1.75).abs() < 1e-14);
        assert!(r
            .weights(WeightScheme::Geometric {
                mu: 1.0,
                eff_lr: 2.0
            })
            .is_err());
    }

    #[test]
    fn running_minimum() {
        assert_eq!(
            record(&[0.0, 0.0, 0.0]).min_grad_norms_sq(),
            vec![3.0, 1.0, 1.0]
        );
    }
}
