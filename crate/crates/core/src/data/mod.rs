//! Datasets: LIBSVM ingestion, synthetic clusters, label-restricted partitions.

mod libsvm;
mod partition;
mod synthetic;

pub use libsvm::{parse_libsvm, read_libsvm_file, to_libsvm, ParseError, ParseErrorKind};
pub use partition::{partition_by_labels, Partition, PartitionError};
pub use synthetic::generate_synthetic;

/// A labelled sparse sample. Feature indices are 1-based and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<(u32, f64)>,
    /// Binary label in `{0, 1}`.
    pub label: u8,
}

impl Sample {
    /// `aᵀx` against a dense parameter vector (`x[i-1]` pairs with feature `i`).
    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.features
            .iter()
            .map(|&(i, v)| v * x[i as usize - 1])
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.features.iter().map(|&(_, v)| v * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    /// Model dimension; at least the largest stored feature index.
    pub dim: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Distinct labels in ascending order.
    pub fn labels(&self) -> Vec<u8> {
        let mut seen = [false; 2];
        for s in &self.samples {
            seen[s.label as usize] = true;
        }
        (0..2u8).filter(|&l| seen[l as usize]).collect()
    }

    /// Widens the model dimension, e.g. to match a published feature count.
    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = self.dim.max(dim);
        self
    }
}
