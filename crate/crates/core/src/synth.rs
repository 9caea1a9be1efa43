//! Seeded synthetic categorical data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{ClassLabels, EncodedDataset, LabeledDataset};
use crate::error::{Error, Result};

/// Objects drawn from `clusters` latent prototypes. Each cell copies its
/// prototype value with probability `purity`, otherwise it is uniform over
/// the attribute's domain. The latent prototype index is the class label.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedMixture {
    pub n: usize,
    pub cardinalities: Vec<usize>,
    pub clusters: usize,
    pub purity: f64,
    pub seed: u64,
}

impl PlantedMixture {
    /// 12,960 objects over nine attributes with the domain sizes of the UCI
    /// Nursery table.
    pub fn nursery_scale(seed: u64) -> Self {
        Self {
            n: 12_960,
            cardinalities: vec![3, 5, 4, 4, 3, 2, 3, 3, 5],
            clusters: 10,
            purity: 0.6,
            seed,
        }
    }

    pub fn generate(&self) -> Result<LabeledDataset> {
        if self.n == 0 || self.cardinalities.is_empty() || self.clusters == 0 {
            return Err(Error::Config("mixture needs n, attributes and clusters".into()));
        }
        if self.cardinalities.contains(&0) {
            return Err(Error::Config("attribute domains must be non-empty".into()));
        }
        if !(0.0..=1.0).contains(&self.purity) {
            return Err(Error::Config(format!("purity {} outside [0, 1]", self.purity)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let prototypes: Vec<Vec<u32>> = (0..self.clusters)
            .map(|_| {
                self.cardinalities
                    .iter()
                    .map(|&p| rng.random_range(0..p as u32))
                    .collect()
            })
            .collect();
        let mut rows = Vec::with_capacity(self.n);
        let mut classes = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let c = rng.random_range(0..self.clusters);
            let row = self
                .cardinalities
                .iter()
                .zip(&prototypes[c])
                .map(|(&p, &proto)| {
                    if rng.random_bool(self.purity) {
                        proto
                    } else {
                        rng.random_range(0..p as u32)
                    }
                })
                .collect();
            rows.push(row);
            classes.push(c.to_string());
        }
        Ok(LabeledDataset {
            data: EncodedDataset::from_codes(&rows)?,
            labels: Some(ClassLabels::from_tokens(classes)),
        })
    }
}

/// `n x m` cells drawn uniformly from `0..values`.
pub fn uniform_rows(n: usize, m: usize, values: u32, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(0..values)).collect())
        .collect()
}
