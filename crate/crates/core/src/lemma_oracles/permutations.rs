use num_rational::Ratio;
use rand::seq::SliceRandom;

use super::OracleError;
use crate::rng::stream;

pub const MAX_EXACT_M: usize = 12;

/// Mean and standard error of a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_error: f64::NAN,
                samples: 0,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            samples: n,
        }
    }
}

/// Distribution summary of `A_{m,k}` over balanced sign arrangements.
///
/// Everything is kept as integer counts over the `C(M, M/2)` arrangements;
/// `abs_sum_scaled` is `Σ |K·A_{m,k}|`, so `E|A| = abs_sum_scaled / (K·total)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermStats {
    pub m_clients: usize,
    pub k_steps: usize,
    pub m: usize,
    pub k: usize,
    pub a_k: f64,
    pub exp_abs: f64,
    pub prob_pos: f64,
    pub prob_zero: f64,
    pub prob_neg: f64,
    pub abs_sum_scaled: u64,
    pub count_pos: u64,
    pub count_zero: u64,
    pub count_neg: u64,
    pub total: u64,
}

impl PermStats {
    pub fn exp_abs_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.abs_sum_scaled, self.k_steps as u64 * self.total)
    }

    /// `(m−1)K² + k²`, i.e. `K²·(m−1+a_k²)`.
    fn scaled_radicand(&self) -> u128 {
        let kk = self.k_steps as u128;
        (self.m as u128 - 1) * kk * kk + (self.k as u128).pow(2)
    }

    /// `(1/20)·√(m−1+a_k²) ≤ E|A|`, decided in integers.
    pub fn satisfies_lower(&self) -> bool {
        let s = self.abs_sum_scaled as u128;
        let t = self.total as u128;
        400 * s * s >= t * t * self.scaled_radicand()
    }

    /// `E|A| ≤ √(m−1+a_k²)`, decided in integers.
    pub fn satisfies_upper(&self) -> bool {
        let s = self.abs_sum_scaled as u128;
        let t = self.total as u128;
        s * s <= t * t * self.scaled_radicand()
    }

    pub fn symmetric(&self) -> bool {
        self.count_pos == self.count_neg
    }

    /// `1/6 ≤ Pr(A > 0) ≤ 1/2`, decided in integers.
    pub fn in_sign_window(&self) -> bool {
        6 * self.count_pos >= self.total && 2 * self.count_pos <= self.total
    }
}

fn check_m(m_clients: usize) -> Result<(), OracleError> {
    if m_clients == 0 || m_clients % 2 == 1 {
        return Err(OracleError::OddM(m_clients));
    }
    Ok(())
}

fn check_index(m_clients: usize, k_steps: usize, m: usize, k: usize) -> Result<(), OracleError> {
    if k_steps == 0 {
        return Err(OracleError::Range("K must be at least 1".into()));
    }
    let ok = (1..=m_clients).contains(&m) && k < k_steps || m == m_clients + 1 && k == 0;
    if ok {
        Ok(())
    } else {
        Err(OracleError::Range(format!(
            "(m, k) = ({m}, {k}) with M = {m_clients}, K = {k_steps}; need 1 ≤ m ≤ M and k < K, or (M+1, 0)"
        )))
    }
}

/// Every arrangement of `M/2` plus and `M/2` minus signs, as bitmasks
/// (bit `i` set ⇔ `τ_{i+1} = +1`), in increasing order.
pub fn balanced_arrangements(m_clients: usize) -> Vec<u32> {
    (0u32..1 << m_clients)
        .filter(|mask| mask.count_ones() as usize * 2 == m_clients)
        .collect()
}

#[inline]
fn sign(mask: u32, i: usize) -> i64 {
    if mask >> i & 1 == 1 {
        1
    } else {
        -1
    }
}

/// `K·A_{m,k}` for one arrangement.
fn scaled_partial_sum(mask: u32, m_clients: usize, k_steps: usize, m: usize, k: usize) -> i64 {
    let prefix: i64 = (0..m - 1).map(|i| sign(mask, i)).sum();
    let tail = if m <= m_clients {
        k as i64 * sign(mask, m - 1)
    } else {
        0
    };
    k_steps as i64 * prefix + tail
}

/// Exact statistics of `A_{m,k} = E_{m−1} + (k/K)·τ_m` by enumeration.
///
/// `m = M+1` is accepted with `k = 0`, where `A` is the full (zero) sum.
pub fn exact_perm_stats(
    m_clients: usize,
    k_steps: usize,
    m: usize,
    k: usize,
) -> Result<PermStats, OracleError> {
    check_m(m_clients)?;
    if m_clients > MAX_EXACT_M {
        return Err(OracleError::TooLargeM(m_clients));
    }
    check_index(m_clients, k_steps, m, k)?;

    let (mut abs_sum, mut pos, mut zero, mut neg, mut total) = (0u64, 0u64, 0u64, 0u64, 0u64);
    for mask in balanced_arrangements(m_clients) {
        let v = scaled_partial_sum(mask, m_clients, k_steps, m, k);
        abs_sum += v.unsigned_abs();
        match v.signum() {
            1 => pos += 1,
            0 => zero += 1,
            _ => neg += 1,
        }
        total += 1;
    }
    let tf = total as f64;
    Ok(PermStats {
        m_clients,
        k_steps,
        m,
        k,
        a_k: k as f64 / k_steps as f64,
        exp_abs: abs_sum as f64 / (k_steps as f64 * tf),
        prob_pos: pos as f64 / tf,
        prob_zero: zero as f64 / tf,
        prob_neg: neg as f64 / tf,
        abs_sum_scaled: abs_sum,
        count_pos: pos,
        count_zero: zero,
        count_neg: neg,
        total,
    })
}

/// Monte-Carlo estimate of `E|A_{m,k}|` for any even `M`.
pub fn mc_perm_stats(
    m_clients: usize,
    k_steps: usize,
    m: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<McEstimate, OracleError> {
    check_m(m_clients)?;
    check_index(m_clients, k_steps, m, k)?;
    let mut rng = stream(seed, 0xA5A5);
    let mut taus: Vec<i64> = (0..m_clients)
        .map(|i| if i < m_clients / 2 { 1 } else { -1 })
        .collect();
    let a = k as f64 / k_steps as f64;
    let draws: Vec<f64> = (0..samples)
        .map(|_| {
            taus.shuffle(&mut rng);
            let prefix: i64 = taus[..m - 1].iter().sum();
            let tail = if m <= m_clients {
                a * taus[m - 1] as f64
            } else {
                0.0
            };
            (prefix as f64 + tail).abs()
        })
        .collect();
    Ok(McEstimate::from_samples(&draws))
}
