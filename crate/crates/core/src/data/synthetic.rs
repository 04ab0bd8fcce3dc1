use rand_distr::{Distribution, StandardNormal};

use super::{Dataset, Sample};
use crate::rng::data_stream;

/// Two unit-variance Gaussian clusters centred at `±1` on every coordinate.
///
/// Even-indexed samples carry label 1 (mean `+1`), odd-indexed samples label 0
/// (mean `−1`), giving a `⌈n/2⌉ / ⌊n/2⌋` split. Features are stored densely.
pub fn generate_synthetic(n: usize, dim: usize, seed: u64) -> Dataset {
    let mut rng = data_stream(seed);
    let samples = (0..n)
        .map(|i| {
            let label = u8::from(i % 2 == 0);
            let mean = if label == 1 { 1.0 } else { -1.0 };
            let features = (1..=dim as u32)
                .map(|j| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (j, mean + z)
                })
                .collect();
            Sample { features, label }
        })
        .collect();
    Dataset { samples, dim }
}
