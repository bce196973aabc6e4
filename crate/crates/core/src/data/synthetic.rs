//! Two-Gaussian benchmark data for smoke runs and tests.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{Dataset, Split};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Purpose};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoGaussians {
    pub n_features: usize,
    /// Distance between the class means, in units of the per-feature
    /// standard deviation.
    pub separation: f64,
    pub train: usize,
    pub val: usize,
    pub test: usize,
    pub seed: u64,
}

impl Default for TwoGaussians {
    fn default() -> Self {
        Self { n_features: 64, separation: 6.0, train: 500, val: 200, test: 200, seed: 0 }
    }
}

impl TwoGaussians {
    /// Draws train, validation and test splits. Labels alternate 0/1 within
    /// a split so each is balanced; class means sit at `±separation/2` along
    /// a random unit direction and the noise is isotropic with unit variance.
    pub fn generate(&self) -> Result<[Dataset; 3]> {
        if self.n_features == 0 || !(self.separation.is_finite() && self.separation >= 0.0) {
            return Err(Error::Config("two-gaussian data needs features and a finite separation".into()));
        }
        let mut rng = stream_rng(self.seed, Purpose::Synthetic, 0, 0);
        let mut direction: Vec<f64> =
            (0..self.n_features).map(|_| rng.sample(StandardNormal)).collect();
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        direction.iter_mut().for_each(|v| *v /= norm);

        let sizes = [(Split::Train, self.train), (Split::Validation, self.val), (Split::Test, self.test)];
        let mut out = Vec::with_capacity(3);
        for (k, (split, size)) in sizes.into_iter().enumerate() {
            let mut rng = stream_rng(self.seed, Purpose::Synthetic, 1 + k as u64, 0);
            let mut features = Vec::with_capacity(size * self.n_features);
            let labels: Vec<u32> = (0..size as u32).map(|i| i % 2).collect();
            for &label in &labels {
                let offset = if label == 1 { 0.5 } else { -0.5 } * self.separation;
                for d in &direction {
                    let noise: f64 = rng.sample(StandardNormal);
                    features.push(offset * d + noise);
                }
            }
            out.push(Dataset::new(self.n_features, features, labels, split)?);
        }
        Ok(out.try_into().expect("three splits"))
    }
}
