//! Python bindings for the `swarmvqc` crate.

use std::sync::Mutex;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use swarmvqc::data::{make_fitness, Dataset, FitnessMode, Split};
use swarmvqc::harness::{run_experiment as run_core, ExperimentConfig};
use swarmvqc::pso::{optimize as optimize_core, SwarmConfig};
use swarmvqc::{Circuit, Error, Gate};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// An immutable gate list over a fixed number of qubits.
#[pyclass(name = "Circuit", module = "pyswarmvqc", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyCircuit {
    inner: Circuit,
}

#[pymethods]
impl PyCircuit {
    /// Gates are `("RX" | "RY" | "RZ", target, angle)` or `("CNOT", control, target)`.
    #[new]
    fn new(n_qubits: usize, gates: Vec<(String, usize, f64)>) -> PyResult<Self> {
        let text = std::iter::once(format!("qubits {n_qubits}"))
            .chain(gates.iter().map(|(name, a, b)| match name.as_str() {
                "CNOT" => format!("CNOT {a} {b}"),
                _ => format!("{name} {a} {b}"),
            }))
            .collect::<Vec<_>>()
            .join("\n");
        Self::from_text(&text)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Circuit::from_text(text).map(|inner| Self { inner }).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_qasm(&self) -> String {
        self.inner.to_qasm()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn gates(&self) -> Vec<(String, usize, f64)> {
        self.inner
            .gates()
            .iter()
            .map(|g| match *g {
                Gate::Rotation { axis, target, angle } => (format!("R{axis:?}"), target, angle),
                Gate::Cnot { control, target } => ("CNOT".to_string(), control, target as f64),
            })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Circuit(n_qubits={}, gates={})", self.inner.n_qubits(), self.inner.len())
    }
}

/// Decodes a particle position in `[0, 1]^d` into `d / 4` gates.
#[pyfunction]
fn decode_particle(position: Vec<f64>, n_qubits: usize) -> PyResult<PyCircuit> {
    swarmvqc::decode_particle(&position, n_qubits).map(|inner| PyCircuit { inner }).map_err(to_py)
}

/// Angle-encodes `features`, runs the circuit and reads qubit 0.
/// Returns `(expectation, probability_class1, label)`.
#[pyfunction]
fn run_and_classify(circuit: &PyCircuit, features: Vec<f64>) -> PyResult<(f64, f64, u8)> {
    let r = swarmvqc::run_and_classify(&circuit.inner, &features).map_err(to_py)?;
    Ok((r.expectation, r.probability_class1, r.predicted_label))
}

/// Returns `(pruned_circuit, removed_gate_indices)`.
#[pyfunction]
#[pyo3(signature = (circuit, readout_qubit = 0))]
fn prune(circuit: &PyCircuit, readout_qubit: usize) -> PyResult<(PyCircuit, Vec<usize>)> {
    let report = swarmvqc::prune_dead_gates(&circuit.inner, readout_qubit).map_err(to_py)?;
    Ok((PyCircuit { inner: report.kept_circuit }, report.removed_gates))
}

#[pyfunction]
fn build_fixed_ansatz(params: Vec<f64>, n_qubits: usize, n_layers: usize) -> PyResult<PyCircuit> {
    swarmvqc::build_fixed_ansatz(&params, n_qubits, n_layers)
        .map(|inner| PyCircuit { inner })
        .map_err(to_py)
}

#[pyfunction]
fn accuracy(predictions: Vec<u32>, labels: Vec<u32>) -> PyResult<f64> {
    swarmvqc::accuracy(&predictions, &labels).map_err(to_py)
}

/// `[(precision, recall, f1) for class 0, same for class 1]`.
#[pyfunction]
fn class_report(predictions: Vec<u32>, labels: Vec<u32>) -> PyResult<Vec<(f64, f64, f64)>> {
    let report = swarmvqc::class_report(&predictions, &labels).map_err(to_py)?;
    Ok(report.iter().map(|m| (m.precision, m.recall, m.f1)).collect())
}

fn swarm_config(dimensions: usize, particles: usize, iterations: usize, seed: u64) -> SwarmConfig {
    SwarmConfig { dimensions, n_particles: particles, iterations, seed, ..SwarmConfig::default() }
}

/// Minimizes a Python callable over `[0, 1]^dimensions` with the default
/// schedules. Returns `(best_position, best_fitness, gbest_history)`.
#[pyfunction]
#[pyo3(signature = (fitness, dimensions, particles = 50, iterations = 100, seed = 0))]
fn optimize(
    py: Python<'_>,
    fitness: Py<PyAny>,
    dimensions: usize,
    particles: usize,
    iterations: usize,
    seed: u64,
) -> PyResult<(Vec<f64>, f64, Vec<f64>)> {
    let config = swarm_config(dimensions, particles, iterations, seed);
    let raised: Mutex<Option<PyErr>> = Mutex::new(None);
    let objective = |position: &[f64]| {
        Python::attach(|py| {
            fitness.call1(py, (position.to_vec(),)).and_then(|v| v.extract::<f64>(py)).map_err(|e| {
                let message = e.to_string();
                raised.lock().unwrap().get_or_insert(e);
                Error::Invariant(format!("python fitness raised: {message}"))
            })
        })
    };
    let result = py.detach(|| optimize_core(objective, &config));
    match result {
        Ok(r) => Ok((r.best_position, r.best_fitness, r.history.iter().map(|h| h.gbest_fitness).collect())),
        Err(e) => Err(raised.into_inner().unwrap().unwrap_or_else(|| to_py(e))),
    }
}

/// Runs the swarm on preprocessed features (`n_qubits` columns in `[0, π]`)
/// with the built-in classification objective. Returns `(circuit, fitness)`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (features, labels, dimensions = 40, particles = 50, iterations = 100, seed = 0, fitness = "error_rate"))]
fn search(
    py: Python<'_>,
    features: Vec<Vec<f64>>,
    labels: Vec<u32>,
    dimensions: usize,
    particles: usize,
    iterations: usize,
    seed: u64,
    fitness: &str,
) -> PyResult<(PyCircuit, f64)> {
    let mode: FitnessMode = fitness.parse().map_err(to_py)?;
    let train = Dataset::from_rows(&features, labels, Split::Train).map_err(to_py)?;
    let n_qubits = train.n_features();
    let config = swarm_config(dimensions, particles, iterations, seed);
    py.detach(|| {
        let objective = make_fitness(&train, n_qubits, mode)?;
        let result = optimize_core(objective, &config)?;
        let circuit = swarmvqc::decode_particle(&result.best_position, n_qubits)?;
        Ok((PyCircuit { inner: circuit }, result.best_fitness))
    })
    .map_err(to_py)
}

/// Runs a full experiment from `key = value` config text and returns the
/// metrics as `[(method, split, accuracy), ...]`.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &str) -> PyResult<Vec<(String, String, f64)>> {
    let mut parsed = ExperimentConfig::default();
    parsed.merge_text(config).map_err(to_py)?;
    let summary = py.detach(|| run_core(&parsed)).map_err(to_py)?;
    Ok(summary.metrics.into_iter().map(|r| (r.method, r.split, r.accuracy)).collect())
}

#[pymodule]
fn pyswarmvqc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_function(wrap_pyfunction!(decode_particle, m)?)?;
    m.add_function(wrap_pyfunction!(run_and_classify, m)?)?;
    m.add_function(wrap_pyfunction!(prune, m)?)?;
    m.add_function(wrap_pyfunction!(build_fixed_ansatz, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(class_report, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
