use num_rational::Ratio;
use rand::Rng;

use super::permutations::McEstimate;
use super::OracleError;
use crate::rng::stream;

pub const MAX_EXACT_N: usize = 24;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `E|τ₁ + … + τ_n|` for i.i.d. fair signs, as an exact fraction.
pub fn exact_abs_partial_sum_iid_ratio(n: usize) -> Result<Ratio<u64>, OracleError> {
    if n > MAX_EXACT_N {
        return Err(OracleError::TooLargeN(n));
    }
    let n64 = n as u64;
    // j plus-signs give the sum 2j − n
    let numer: u64 = (0..=n64)
        .map(|j| binomial(n64, j) * (2 * j).abs_diff(n64))
        .sum();
    Ok(Ratio::new(numer, 1u64 << n))
}

pub fn exact_abs_partial_sum_iid(n: usize) -> Result<f64, OracleError> {
    let r = exact_abs_partial_sum_iid_ratio(n)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// Monte-Carlo estimate of `E|E_n|` for any `n`.
pub fn mc_abs_partial_sum_iid(n: usize, samples: usize, seed: u64) -> McEstimate {
    let mut rng = stream(seed, 0x5151);
    let draws: Vec<f64> = (0..samples)
        .map(|_| {
            let plus = (0..n).filter(|_| rng.random::<bool>()).count() as i64;
            (2 * plus - n as i64).abs() as f64
        })
        .collect();
    McEstimate::from_samples(&draws)
}
