//! Statevector simulation, angle encoding, and Z readout.
//!
//! Amplitudes are stored little-endian: qubit `q` is bit `q` of the basis
//! index, so `|q1 q0> = |10>` lives at index 2.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{Axis, Circuit, Gate};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 24;

/// Features further than this outside `[0, pi]` are rejected by the encoder.
pub const FEATURE_TOLERANCE: f64 = 1e-9;

/// The qubit whose Z expectation decides the predicted class.
pub const READOUT_QUBIT: usize = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Builds the state from raw amplitudes. The caller is responsible for the
    /// normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidGate(format!("{len} amplitudes is not 2^n for n >= 1")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// The product state reached by applying `RY(features[q])` to each qubit
    /// of `|0...0>`, built directly instead of gate by gate.
    pub fn angle_encoded(features: &[f64]) -> Result<Self> {
        validate_features(features)?;
        let mut state = Self::zero(features.len())?;
        let halves: Vec<(f64, f64)> =
            features.iter().map(|&x| ((x / 2.0).cos(), (x / 2.0).sin())).collect();
        for (index, amp) in state.amplitudes.iter_mut().enumerate() {
            let mut value = 1.0;
            for (q, &(c, s)) in halves.iter().enumerate() {
                value *= if index >> q & 1 == 0 { c } else { s };
            }
            *amp = Complex64::new(value, 0.0);
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, index: usize) -> Result<()> {
        if index < self.n_qubits {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { index, n_qubits: self.n_qubits })
        }
    }

    /// Applies one gate in place by iterating amplitude pairs with the gate's
    /// stride.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Rotation { axis, target, angle } => {
                let m = rotation_matrix(axis, angle);
                let stride = 1 << target;
                for block in (0..self.amplitudes.len()).step_by(stride << 1) {
                    for i in block..block + stride {
                        let (a0, a1) = (self.amplitudes[i], self.amplitudes[i + stride]);
                        self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                        self.amplitudes[i + stride] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (cmask, tmask) = (1usize << control, 1usize << target);
                for i in 0..self.amplitudes.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                actual: circuit.n_qubits(),
            });
        }
        circuit.gates().iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Probability that measuring `qubit` yields 0.
    pub fn probability_zero(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1 << qubit;
        let p: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(p.clamp(0.0, 1.0))
    }

    /// `<Z>` on `qubit`: +1 weight where the qubit's bit is 0, -1 where it is 1.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1 << qubit;
        let e: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| if i & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum();
        Ok(e.clamp(-1.0, 1.0))
    }

    /// Estimates `<Z>` on `qubit` from `shots` simulated measurements.
    pub fn sample_expectation<R: Rng + ?Sized>(
        &self,
        qubit: usize,
        shots: usize,
        rng: &mut R,
    ) -> Result<f64> {
        if shots == 0 {
            return Err(Error::Empty("shots must be at least 1".into()));
        }
        let p0 = self.probability_zero(qubit)?;
        let zeros = (0..shots).filter(|_| rng.random::<f64>() < p0).count();
        Ok(2.0 * zeros as f64 / shots as f64 - 1.0)
    }
}

/// Row-major 2x2 unitary for a rotation about `axis`.
pub fn rotation_matrix(axis: Axis, angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    match axis {
        Axis::X => [[re(c), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), re(c)]],
        Axis::Y => [[re(c), re(-s)], [re(s), re(c)]],
        Axis::Z => [
            [Complex64::new(c, -s), re(0.0)],
            [re(0.0), Complex64::new(c, s)],
        ],
    }
}

fn validate_features(features: &[f64]) -> Result<()> {
    if features.is_empty() {
        return Err(Error::Empty("feature vector".into()));
    }
    for (index, &value) in features.iter().enumerate() {
        if !(-FEATURE_TOLERANCE..=PI + FEATURE_TOLERANCE).contains(&value) {
            return Err(Error::FeatureOutOfRange { index, value });
        }
    }
    Ok(())
}

/// The encoding prefix: `RY(features[q])` on qubit `q`.
pub fn angle_encode(features: &[f64]) -> Result<Circuit> {
    validate_features(features)?;
    Circuit::new(
        features.len(),
        features.iter().enumerate().map(|(q, &x)| Gate::ry(q, x)).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutResult {
    pub expectation: f64,
    pub probability_class1: f64,
    pub predicted_label: u8,
}

impl ReadoutResult {
    /// Class-1 probability is `(1 - <Z>) / 2`, thresholded at 0.5.
    pub fn from_expectation(expectation: f64) -> Self {
        let expectation = expectation.clamp(-1.0, 1.0);
        let probability_class1 = (1.0 - expectation) / 2.0;
        Self {
            expectation,
            probability_class1,
            predicted_label: u8::from(probability_class1 >= 0.5),
        }
    }
}

/// Encodes `features`, runs `circuit`, and returns the final state.
pub fn simulate(circuit: &Circuit, features: &[f64]) -> Result<Statevector> {
    if features.len() != circuit.n_qubits() {
        return Err(Error::LengthMismatch { expected: circuit.n_qubits(), actual: features.len() });
    }
    let mut state = Statevector::angle_encoded(features)?;
    state.apply_circuit(circuit)?;
    Ok(state)
}

/// Encode, run, and read `<Z>` on the readout qubit.
pub fn run_and_classify(circuit: &Circuit, features: &[f64]) -> Result<ReadoutResult> {
    let state = simulate(circuit, features)?;
    Ok(ReadoutResult::from_expectation(state.expectation_z(READOUT_QUBIT)?))
}

/// As [`run_and_classify`], with `<Z>` estimated from `shots` measurements.
pub fn run_and_classify_sampled<R: Rng + ?Sized>(
    circuit: &Circuit,
    features: &[f64],
    shots: usize,
    rng: &mut R,
) -> Result<ReadoutResult> {
    let state = simulate(circuit, features)?;
    Ok(ReadoutResult::from_expectation(state.sample_expectation(READOUT_QUBIT, shots, rng)?))
}
