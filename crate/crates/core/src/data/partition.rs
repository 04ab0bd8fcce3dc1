use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::Dataset;

/// Disjoint client shards of sample indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub shards: Vec<Vec<usize>>,
    pub labels_per_client: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("need at least one client")]
    NoClients,
    #[error(
        "C = {c} labels per client requested but the dataset has only {distinct} distinct labels"
    )]
    TooManyLabels { c: usize, distinct: usize },
    #[error("{m} clients × {c} labels cannot cover all {distinct} labels")]
    UnassignedLabels { m: usize, c: usize, distinct: usize },
    #[error("label {label} has {samples} samples but {holders} clients hold it")]
    LabelTooSmall {
        label: u8,
        samples: usize,
        holders: usize,
    },
}

/// Gives each of `m` clients exactly `c` labels and splits every label's
/// samples uniformly at random among its holders.
///
/// Labels are shuffled once and then dealt round-robin: client `i` receives
/// `order[(i·c + j) mod L]` for `j < c`. Chunk sizes of one label differ by at
/// most one sample. Shards are returned sorted. Fails when `m·c` is below the
/// label count, since some samples would then belong to no client.
pub fn partition_by_labels<R: Rng + ?Sized>(
    ds: &Dataset,
    m: usize,
    c: usize,
    rng: &mut R,
) -> Result<Partition, PartitionError> {
    if m == 0 {
        return Err(PartitionError::NoClients);
    }
    let mut order = ds.labels();
    let distinct = order.len();
    if c == 0 || c > distinct {
        return Err(PartitionError::TooManyLabels { c, distinct });
    }
    if m * c < distinct {
        return Err(PartitionError::UnassignedLabels { m, c, distinct });
    }
    order.shuffle(rng);

    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); 2];
    for client in 0..m {
        for j in 0..c {
            let label = order[(client * c + j) % distinct];
            holders[label as usize].push(client);
        }
    }

    let mut shards = vec![Vec::new(); m];
    for &label in &ds.labels() {
        let owners = &holders[label as usize];
        if owners.is_empty() {
            continue;
        }
        let mut idx: Vec<usize> = (0..ds.len())
            .filter(|&i| ds.samples[i].label == label)
            .collect();
        if idx.len() < owners.len() {
            return Err(PartitionError::LabelTooSmall {
                label,
                samples: idx.len(),
                holders: owners.len(),
            });
        }
        idx.shuffle(rng);
        let (base, extra) = (idx.len() / owners.len(), idx.len() % owners.len());
        let mut start = 0;
        for (j, &client) in owners.iter().enumerate() {
            let len = base + usize::from(j < extra);
            shards[client].extend_from_slice(&idx[start..start + len]);
            start += len;
        }
    }
    for s in &mut shards {
        s.sort_unstable();
    }
    Ok(Partition {
        shards,
        labels_per_client: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synthetic;
    use crate::rng::data_stream;
    use proptest::prelude::*;

    #[test]
    fn two_clients_one_label_each() {
        let ds = generate_synthetic(10, 2, 0);
        let p = partition_by_labels(&ds, 2, 1, &mut data_stream(3)).unwrap();
        let labels = |s: &Vec<usize>| {
            let mut l: Vec<u8> = s.iter().map(|&i| ds.samples[i].label).collect();
            l.dedup();
            l
        };
        assert_eq!(labels(&p.shards[0]).len(), 1);
        assert_eq!(labels(&p.shards[1]).len(), 1);
        assert_ne!(labels(&p.shards[0]), labels(&p.shards[1]));
        assert_eq!(p.shards[0].len() + p.shards[1].len(), 10);
    }

    #[test]
    fn errors() {
        let ds = generate_synthetic(4, 1, 0);
        assert_eq!(
            partition_by_labels(&ds, 2, 3, &mut data_stream(0)),
            Err(PartitionError::TooManyLabels { c: 3, distinct: 2 })
        );
        let e = partition_by_labels(&ds, 6, 1, &mut data_stream(0)).unwrap_err();
        assert!(matches!(
            e,
            PartitionError::LabelTooSmall {
                samples: 2,
                holders: 3,
                ..
            }
        ));
        assert_eq!(
            partition_by_labels(&ds, 1, 1, &mut data_stream(0)),
            Err(PartitionError::UnassignedLabels {
                m: 1,
                c: 1,
                distinct: 2
            })
        );
    }

    proptest! {
        #[test]
        fn disjoint_covering_and_label_restricted(m in 1usize..12, c in 1usize..=2, seed in 0u64..1000) {
            let ds = generate_synthetic(60, 2, seed);
            prop_assume!(m * c >= 2);
            let p = partition_by_labels(&ds, m, c, &mut data_stream(seed)).unwrap();
            let again = partition_by_labels(&ds, m, c, &mut data_stream(seed)).unwrap();
            prop_assert_eq!(&p, &again);
            let mut all: Vec<usize> = p.shards.iter().flatten().copied().collect();
            all.sort_unstable();
            let n = all.len();
            all.dedup();
            prop_assert_eq!(all.len(), n, "shards overlap");
            prop_assert_eq!(n, ds.len());
            for s in &p.shards {
                let mut l: Vec<u8> = s.iter().map(|&i| ds.samples[i].label).collect();
                l.sort_unstable();
                l.dedup();
                prop_assert_eq!(l.len(), c);
            }
        }
    }
}
