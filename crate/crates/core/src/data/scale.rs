use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Per-feature min-max scaling into the encoding range `[0, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerModel {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalerModel {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Empty("cannot fit a scaler on an empty split".into()));
        }
        let m = train.n_features();
        let mut min = vec![f64::INFINITY; m];
        let mut max = vec![f64::NEG_INFINITY; m];
        for row in train.rows() {
            for j in 0..m {
                min[j] = min[j].min(row[j]);
                max[j] = max[j].max(row[j]);
            }
        }
        for (j, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if lo == hi {
                log::warn!("feature {j} is constant on the training split; it will encode as pi/2");
            }
        }
        Ok(Self { min, max })
    }

    pub fn scale_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.min.len() {
            return Err(Error::LengthMismatch { expected: self.min.len(), actual: row.len() });
        }
        Ok(row
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| {
                if hi > lo {
                    (PI * (x - lo) / (hi - lo)).clamp(0.0, PI)
                } else {
                    FRAC_PI_2
                }
            })
            .collect())
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let mut out = Vec::with_capacity(data.features().len());
        for row in data.rows() {
            out.extend(self.scale_row(row)?);
        }
        Ok(data.with_features(data.n_features(), out))
    }
}
