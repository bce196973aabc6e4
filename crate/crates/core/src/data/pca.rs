use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Principal axes of a training set.
///
/// `components` rows are orthonormal and ordered by descending explained
/// variance. Each row's largest-magnitude entry is positive, which pins the
/// eigenvector sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    /// Eigendecomposition of the sample covariance (divisor `n - 1`).
    pub fn fit(train: &Dataset, k: usize) -> Result<Self> {
        let (n, m) = (train.len(), train.n_features());
        if n < 2 {
            return Err(Error::Pca(format!("need at least 2 samples, got {n}")));
        }
        if k == 0 || k > n.min(m) {
            return Err(Error::Pca(format!("k = {k} must lie in 1..={}", n.min(m))));
        }

        let mut mean = vec![0.0; m];
        for row in train.rows() {
            for (acc, x) in mean.iter_mut().zip(row) {
                *acc += x;
            }
        }
        mean.iter_mut().for_each(|v| *v /= n as f64);

        let centered = DMatrix::from_fn(n, m, |i, j| train.row(i)[j] - mean[j]);
        if centered.iter().all(|&v| v == 0.0) {
            return Err(Error::Pca("zero variance: all rows are identical".into()));
        }
        let covariance = centered.tr_mul(&centered) / (n - 1) as f64;
        let eigen = SymmetricEigen::new(covariance);

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));

        let mut components = Vec::with_capacity(k);
        let mut explained_variance = Vec::with_capacity(k);
        for &idx in order.iter().take(k) {
            let mut axis: Vec<f64> = eigen.eigenvectors.column(idx).iter().copied().collect();
            let pivot = axis
                .iter()
                .enumerate()
                .fold(0, |best, (j, v)| if v.abs() > axis[best].abs() { j } else { best });
            if axis[pivot] < 0.0 {
                axis.iter_mut().for_each(|v| *v = -*v);
            }
            components.push(axis);
            explained_variance.push(eigen.eigenvalues[idx].max(0.0));
        }

        Ok(Self { mean, components, explained_variance })
    }

    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Projects one row: `(x - mean) . components^T`.
    pub fn project(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_features() {
            return Err(Error::LengthMismatch { expected: self.n_features(), actual: row.len() });
        }
        Ok(self
            .components
            .iter()
            .map(|axis| axis.iter().zip(row).zip(&self.mean).map(|((a, x), mu)| a * (x - mu)).sum())
            .collect())
    }

    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        let mut out = Vec::with_capacity(data.len() * self.k());
        for row in data.rows() {
            out.extend(self.project(row)?);
        }
        Ok(data.with_features(self.k(), out))
    }
}
