//! Gradient-trained comparison model: a fixed layered ansatz of RY rotations
//! and a CNOT ring, trained with Adam on parameter-shift gradients of the
//! binary cross-entropy.
//!
//! Layer `l` applies `RY(params[l * n + q])` to each qubit `q` in ascending
//! order, then `CNOT(q, (q + 1) % n)` for `q = 0..n`. Eight qubits and two
//! layers give 16 parameters and 32 gates.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{binary_cross_entropy, PROBABILITY_CLIP};
use crate::rng::{stream_rng, Purpose};
use crate::sim::run_and_classify;

#[derive(Debug, Clone, PartialEq)]
pub struct FixedAnsatz {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub params: Vec<f64>,
}

impl FixedAnsatz {
    pub fn new(n_qubits: usize, n_layers: usize, params: Vec<f64>) -> Result<Self> {
        if n_qubits < 2 || n_layers == 0 {
            return Err(Error::Config("the ansatz needs >= 2 qubits and >= 1 layer".into()));
        }
        if params.len() != n_qubits * n_layers {
            return Err(Error::LengthMismatch { expected: n_qubits * n_layers, actual: params.len() });
        }
        Ok(Self { n_qubits, n_layers, params })
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn circuit(&self) -> Circuit {
        ring_circuit(self.n_qubits, &self.params)
    }

    pub fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        Self::new(self.n_qubits, self.n_layers, params)
    }
}

fn ring_circuit(n: usize, params: &[f64]) -> Circuit {
    let mut gates = Vec::with_capacity(params.len() * 2);
    for layer in params.chunks_exact(n) {
        gates.extend(layer.iter().enumerate().map(|(q, &theta)| Gate::ry(q, theta)));
        gates.extend((0..n).map(|q| Gate::cnot(q, (q + 1) % n)));
    }
    Circuit::new(n, gates).expect("ring gates are in range")
}

/// The ansatz circuit for `params`, `n_qubits * n_layers` of them.
pub fn build_fixed_ansatz(params: &[f64], n_qubits: usize, n_layers: usize) -> Result<Circuit> {
    Ok(FixedAnsatz::new(n_qubits, n_layers, params.to_vec())?.circuit())
}

/// Mean clipped binary cross-entropy of the readout over `batch`.
pub fn loss(ansatz: &FixedAnsatz, batch: &Dataset) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::Empty("loss needs a non-empty batch".into()));
    }
    let circuit = ansatz.circuit();
    let total: f64 = (0..batch.len())
        .into_par_iter()
        .map(|i| {
            let r = run_and_classify(&circuit, batch.row(i))?;
            Ok(binary_cross_entropy(r.probability_class1, batch.labels()[i]))
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    Ok(total / batch.len() as f64)
}

/// `(f(θ + π/2 e_k) - f(θ - π/2 e_k)) / 2` for every `k`: the exact
/// derivative of an expectation in which each parameter drives one rotation.
pub fn shift_gradient<F>(params: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut shifted = params.to_vec();
    (0..params.len())
        .map(|k| {
            shifted[k] = params[k] + FRAC_PI_2;
            let plus = f(&shifted)?;
            shifted[k] = params[k] - FRAC_PI_2;
            let minus = f(&shifted)?;
            shifted[k] = params[k];
            Ok((plus - minus) / 2.0)
        })
        .collect()
}

/// Gradient of [`loss`] from parameter-shift derivatives of `<Z>` chained
/// through the cross-entropy. Clipped probabilities contribute zero.
pub fn parameter_shift_gradient(ansatz: &FixedAnsatz, batch: &Dataset) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::Empty("gradient needs a non-empty batch".into()));
    }
    let n = ansatz.n_qubits;
    let per_sample: Vec<Vec<f64>> = (0..batch.len())
        .into_par_iter()
        .map(|i| {
            let (row, y) = (batch.row(i), batch.labels()[i]);
            let expectation = |params: &[f64]| {
                run_and_classify(&ring_circuit(n, params), row).map(|r| r.expectation)
            };
            let p = (1.0 - expectation(&ansatz.params)?) / 2.0;
            if !(PROBABILITY_CLIP..=1.0 - PROBABILITY_CLIP).contains(&p) {
                return Ok(vec![0.0; ansatz.n_params()]);
            }
            let y = f64::from(y);
            let dloss_dp = -y / p + (1.0 - y) / (1.0 - p);
            // p = (1 - E) / 2
            let scale = -0.5 * dloss_dp;
            Ok(shift_gradient(&ansatz.params, expectation)?.into_iter().map(|g| scale * g).collect())
        })
        .collect::<Result<_>>()?;

    let mut grad = vec![0.0; ansatz.n_params()];
    for g in &per_sample {
        grad.iter_mut().zip(g).for_each(|(acc, v)| *acc += v);
    }
    grad.iter_mut().for_each(|v| *v /= batch.len() as f64);
    Ok(grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(n_params: usize, learning_rate: f64) -> Self {
        Self {
            first_moment: vec![0.0; n_params],
            second_moment: vec![0.0; n_params],
            step_count: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut [f64], gradient: &[f64]) -> Result<()> {
        let n = self.first_moment.len();
        for len in [params.len(), gradient.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, actual: len });
            }
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let bias1 = 1.0 - self.beta1.powi(t);
        let bias2 = 1.0 - self.beta2.powi(t);
        for i in 0..n {
            let g = gradient[i];
            self.first_moment[i] = self.beta1 * self.first_moment[i] + (1.0 - self.beta1) * g;
            self.second_moment[i] = self.beta2 * self.second_moment[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.first_moment[i] / bias1;
            let v_hat = self.second_moment[i] / bias2;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { n_qubits: 8, n_layers: 2, epochs: 100, batch_size: 32, learning_rate: 0.01, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub initial: FixedAnsatz,
    pub final_ansatz: FixedAnsatz,
    /// Parameters from the epoch with the highest validation accuracy
    /// (earliest on ties).
    pub best_val_ansatz: FixedAnsatz,
    pub best_epoch: usize,
    pub history: Vec<EpochRecord>,
}

impl BaselineResult {
    /// `epoch,train_loss,train_acc,val_loss,val_acc` at full precision.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,val_loss,val_acc\n");
        for r in &self.history {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.epoch, r.train_loss, r.train_acc, r.val_loss, r.val_acc
            ));
        }
        out
    }
}

fn loss_and_accuracy(ansatz: &FixedAnsatz, data: &Dataset) -> Result<(f64, f64)> {
    let circuit = ansatz.circuit();
    let scored: Vec<(f64, bool)> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let r = run_and_classify(&circuit, data.row(i))?;
            let y = data.labels()[i];
            Ok((binary_cross_entropy(r.probability_class1, y), u32::from(r.predicted_label) == y))
        })
        .collect::<Result<_>>()?;
    let n = data.len() as f64;
    let loss = scored.iter().map(|s| s.0).sum::<f64>() / n;
    let acc = scored.iter().filter(|s| s.1).count() as f64 / n;
    Ok((loss, acc))
}

/// Initial angles: uniform in `[0, 2π)` from the run seed.
pub fn initial_params(config: &BaselineConfig) -> Vec<f64> {
    let mut rng = stream_rng(config.seed, Purpose::AnsatzInit, 0, 0);
    (0..config.n_qubits * config.n_layers).map(|_| rng.random::<f64>() * TAU).collect()
}

pub fn train_baseline(train: &Dataset, val: &Dataset, config: &BaselineConfig) -> Result<BaselineResult> {
    train_baseline_with(train, val, config, |_| {})
}

/// Minibatch Adam training. The training split is reshuffled every epoch
/// from the seed; `observer` sees each epoch's record.
pub fn train_baseline_with<O>(
    train: &Dataset,
    val: &Dataset,
    config: &BaselineConfig,
    mut observer: O,
) -> Result<BaselineResult>
where
    O: FnMut(&EpochRecord),
{
    if train.is_empty() || val.is_empty() {
        return Err(Error::Empty("training needs non-empty train and validation splits".into()));
    }
    if config.batch_size == 0 || config.epochs == 0 {
        return Err(Error::Config("batch size and epochs must be positive".into()));
    }
    for split in [train, val] {
        if split.n_features() != config.n_qubits {
            return Err(Error::LengthMismatch { expected: config.n_qubits, actual: split.n_features() });
        }
    }
    if train.len() < config.batch_size {
        log::warn!(
            "training split has {} samples, fewer than one batch of {}; using a single full batch",
            train.len(),
            config.batch_size
        );
    }

    let initial = FixedAnsatz::new(config.n_qubits, config.n_layers, initial_params(config))?;
    let mut ansatz = initial.clone();
    let mut adam = AdamState::new(ansatz.n_params(), config.learning_rate);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, FixedAnsatz)> = None;

    for epoch in 0..config.epochs {
        let mut rng = stream_rng(config.seed, Purpose::EpochShuffle, epoch as u64, 0);
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch = train.select(chunk);
            let grad = parameter_shift_gradient(&ansatz, &batch)?;
            adam.step(&mut ansatz.params, &grad)?;
        }

        let (train_loss, train_acc) = loss_and_accuracy(&ansatz, train)?;
        let (val_loss, val_acc) = loss_and_accuracy(&ansatz, val)?;
        let record = EpochRecord { epoch, train_loss, train_acc, val_loss, val_acc };
        observer(&record);
        history.push(record);
        if best.as_ref().is_none_or(|(acc, _, _)| val_acc > *acc) {
            best = Some((val_acc, epoch, ansatz.clone()));
        }
    }

    let (_, best_epoch, best_val_ansatz) = best.expect("at least one epoch ran");
    Ok(BaselineResult { initial, final_ansatz: ansatz, best_val_ansatz, best_epoch, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Split;
    use crate::sim::Statevector;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn paper_shape() {
        let ansatz = FixedAnsatz::new(8, 2, vec![0.0; 16]).unwrap();
        let circuit = ansatz.circuit();
        assert_eq!(ansatz.n_params(), 16);
        assert_eq!(circuit.len(), 32);
        let cnots = circuit.gates().iter().filter(|g| matches!(g, Gate::Cnot { .. })).count();
        assert_eq!(cnots, 16);

        let mut state = Statevector::zero(8).unwrap();
        state.apply_circuit(&circuit).unwrap();
        assert_eq!(state, Statevector::zero(8).unwrap());
    }

    #[test]
    fn wrong_parameter_count() {
        assert!(matches!(
            build_fixed_ansatz(&[0.0; 15], 8, 2),
            Err(Error::LengthMismatch { expected: 16, actual: 15 })
        ));
    }

    #[test]
    fn two_qubit_single_layer() {
        let circuit = build_fixed_ansatz(&[PI, 0.0], 2, 1).unwrap();
        assert_eq!(
            circuit.gates(),
            &[Gate::ry(0, PI), Gate::ry(1, 0.0), Gate::cnot(0, 1), Gate::cnot(1, 0)]
        );
        // hand evolution: RY(pi) q0 -> q0=1; CNOT(0,1) -> q0=1,q1=1; CNOT(1,0) -> q0=0,q1=1
        let mut state = Statevector::zero(2).unwrap();
        state.apply_circuit(&circuit).unwrap();
        let expected = [0.0, 0.0, 1.0, 0.0];
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-12, "{:?}", state.amplitudes());
        }
    }

    #[test]
    fn shift_rule_on_single_rotation() {
        let expectation = |p: &[f64]| {
            let c = Circuit::new(1, vec![Gate::ry(0, p[0])]).unwrap();
            let mut s = Statevector::zero(1).unwrap();
            s.apply_circuit(&c)?;
            s.expectation_z(0)
        };
        let g = shift_gradient(&[FRAC_PI_2], expectation).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-12);
        let g = shift_gradient(&[0.0], expectation).unwrap();
        assert!(g[0].abs() < 1e-12);
    }

    fn batch(rows: &[Vec<f64>], labels: Vec<u32>) -> Dataset {
        Dataset::from_rows(rows, labels, Split::Train).unwrap()
    }

    #[test]
    fn loss_at_even_odds() {
        // one layer on two qubits maps q0 to the original q1, so <Z0> = cos(pi/2) = 0
        let ansatz = FixedAnsatz::new(2, 1, vec![0.0, FRAC_PI_2]).unwrap();
        let b = batch(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]], vec![0, 1, 1]);
        assert!((loss(&ansatz, &b).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(loss(&ansatz, &batch(&[], vec![])).is_err());
    }

    #[test]
    fn loss_clip_floor() {
        // RY(pi) on q1 -> <Z0> = -1 -> p clipped to 1 - 1e-7
        let ansatz = FixedAnsatz::new(2, 1, vec![0.0, PI]).unwrap();
        let wrong = batch(&[vec![0.0, 0.0]], vec![0]);
        assert!((loss(&ansatz, &wrong).unwrap() - 16.118_095_65).abs() < 1e-6);
        let right = batch(&[vec![0.0, 0.0]], vec![1]);
        assert!((loss(&ansatz, &right).unwrap() - 1e-7).abs() < 1e-12);
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let mut adam = AdamState::new(3, 0.01);
        let mut params = vec![1.0, 2.0, 3.0];
        adam.step(&mut params, &[0.5, 0.5, 0.5]).unwrap();
        for (p, start) in params.iter().zip([1.0, 2.0, 3.0]) {
            assert!((start - p - 0.01).abs() < 1e-8, "{p}");
        }
    }

    #[test]
    fn adam_zero_gradient_is_still() {
        let mut adam = AdamState::new(2, 0.01);
        let mut params = vec![0.3, -0.2];
        adam.step(&mut params, &[1.0, -1.0]).unwrap();
        let moved = params.clone();
        let m = adam.first_moment.clone();
        adam.step(&mut params, &[0.0, 0.0]).unwrap();
        // the first moment still carries the previous gradient, so parameters keep drifting
        assert_ne!(params, moved);
        assert!(adam.first_moment.iter().zip(&m).all(|(a, b)| (a - 0.9 * b).abs() < 1e-15));

        let mut fresh = AdamState::new(2, 0.01);
        let mut params = vec![0.3, -0.2];
        fresh.step(&mut params, &[0.0, 0.0]).unwrap();
        assert_eq!(params, vec![0.3, -0.2]);
    }

    #[test]
    fn adam_two_constant_steps() {
        // closed form with g = 1: m1 = 0.1, v1 = 0.001 -> m_hat = v_hat = 1;
        // m2 = 0.19, v2 = 0.001999 -> m_hat = 1, v_hat = 1 -> step = lr / (1 + eps)
        let mut adam = AdamState::new(1, 0.01);
        let mut params = vec![0.0];
        adam.step(&mut params, &[1.0]).unwrap();
        let first = params[0];
        adam.step(&mut params, &[1.0]).unwrap();
        let second = first - params[0];
        assert!(first < 0.0 && params[0] < first);
        assert!(second > 0.005 && second < 0.015);
        assert!((second - 0.01 / (1.0 + 1e-8)).abs() < 1e-12);
    }

    #[test]
    fn adam_length_mismatch() {
        let mut adam = AdamState::new(2, 0.01);
        assert!(adam.step(&mut [0.0, 0.0], &[1.0]).is_err());
    }

    #[test]
    fn zero_learning_rate_keeps_parameters() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![0.1 * i as f64, 0.2]).collect();
        let data = batch(&rows, (0..10).map(|i| i % 2).collect());
        let config = BaselineConfig {
            n_qubits: 2,
            n_layers: 1,
            epochs: 3,
            batch_size: 4,
            learning_rate: 0.0,
            seed: 5,
        };
        let result = train_baseline(&data, &data, &config).unwrap();
        assert_eq!(result.final_ansatz, result.initial);
        assert!(result.history.windows(2).all(|w| w[0].train_loss == w[1].train_loss));
    }
}
