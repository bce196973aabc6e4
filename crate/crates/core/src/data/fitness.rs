use rayon::prelude::*;

use super::Dataset;
use crate::circuit::{decode_particle, Circuit};
use crate::error::{Error, Result};
use crate::metrics::binary_cross_entropy;
use crate::sim::{run_and_classify, ReadoutResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitnessMode {
    /// `1 - accuracy` on the split.
    #[default]
    ErrorRate,
    /// Mean binary cross-entropy of the class-1 probability.
    CrossEntropy,
}

impl std::str::FromStr for FitnessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "error_rate" => Ok(Self::ErrorRate),
            "cross_entropy" => Ok(Self::CrossEntropy),
            other => Err(Error::Config(format!("unknown fitness mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for FitnessMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ErrorRate => "error_rate",
            Self::CrossEntropy => "cross_entropy",
        })
    }
}

/// Readout of every sample, in row order.
pub fn readout_dataset(circuit: &Circuit, data: &Dataset) -> Result<Vec<ReadoutResult>> {
    (0..data.len()).into_par_iter().map(|i| run_and_classify(circuit, data.row(i))).collect()
}

pub fn classify_dataset(circuit: &Circuit, data: &Dataset) -> Result<Vec<u32>> {
    Ok(readout_dataset(circuit, data)?.into_iter().map(|r| u32::from(r.predicted_label)).collect())
}

/// Builds the swarm objective over `train`: decode the position, classify every
/// sample, and score. Samples are evaluated sequentially; the swarm
/// parallelizes across particles.
pub fn make_fitness(
    train: &Dataset,
    n_qubits: usize,
    mode: FitnessMode,
) -> Result<impl Fn(&[f64]) -> Result<f64> + Sync + '_> {
    if train.is_empty() {
        return Err(Error::Empty("fitness needs training samples".into()));
    }
    if train.n_features() != n_qubits {
        return Err(Error::LengthMismatch { expected: n_qubits, actual: train.n_features() });
    }
    if let Some(&bad) = train.labels().iter().find(|&&y| y > 1) {
        return Err(Error::Dataset(format!("label {bad} is not binary")));
    }
    Ok(move |position: &[f64]| {
        let circuit = decode_particle(position, n_qubits)?;
        let mut score = 0.0;
        for (row, &label) in train.rows().zip(train.labels()) {
            let readout = run_and_classify(&circuit, row)?;
            score += match mode {
                FitnessMode::ErrorRate => f64::from(u32::from(readout.predicted_label) != label),
                FitnessMode::CrossEntropy => {
                    binary_cross_entropy(readout.probability_class1, label)
                }
            };
        }
        Ok(score / train.len() as f64)
    })
}
