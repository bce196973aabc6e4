//! End-to-end experiment runs and their on-disk artifacts.
//!
//! A run directory holds:
//!
//! | file | contents |
//! |---|---|
//! | `manifest.txt` | the full configuration plus recorded split sizes; usable as `--config` |
//! | `preprocess.json` | fitted PCA and scaler, so `evaluate` needs nothing else |
//! | `circuit.txt` | the trained circuit in text form |
//! | `circuit_best_val.txt` | Adam only: parameters from the best validation epoch |
//! | `best_position.txt` | PSO only: the gbest position, one coordinate per line |
//! | `history.csv` | per-iteration or per-epoch training curve |
//! | `metrics.csv` | accuracy per method and split |
//! | `class_report.csv` | test-split precision, recall and F1 per class |
//! | `prune.txt` | light-cone report for `circuit.txt` |

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, Method, FORMAT_VERSION};

use crate::analysis::{prune_dead_gates, PruneReport};
use crate::baseline::train_baseline_with;
use crate::circuit::{decode_particle, Circuit};
use crate::data::{
    filter_first_two_classes, load_csv, make_fitness, readout_dataset, Dataset, PcaModel, ScalerModel,
    Split,
};
use crate::error::{Error, Result};
use crate::metrics::{accuracy, accuracy_csv, class_csv, class_report, AccuracyRecord, ClassMetrics, ClassRecord};
use crate::pso::optimize_with;
use crate::rng::{stream_rng, Purpose};
use crate::sim::{run_and_classify, run_and_classify_sampled, READOUT_QUBIT};

pub const MANIFEST: &str = "manifest.txt";
pub const PREPROCESS: &str = "preprocess.json";
pub const CIRCUIT: &str = "circuit.txt";
pub const CIRCUIT_BEST_VAL: &str = "circuit_best_val.txt";
pub const BEST_POSITION: &str = "best_position.txt";
pub const HISTORY: &str = "history.csv";
pub const METRICS: &str = "metrics.csv";
pub const CLASS_REPORT: &str = "class_report.csv";
pub const PRUNE: &str = "prune.txt";

/// PCA followed by min-max scaling into `[0, π]`, both fitted on the
/// training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub format_version: u32,
    pub pca: PcaModel,
    pub scaler: ScalerModel,
}

impl Preprocessor {
    pub fn fit(train: &Dataset, k: usize) -> Result<Self> {
        let pca = PcaModel::fit(train, k)?;
        let scaler = ScalerModel::fit(&pca.transform(train)?)?;
        Ok(Self { format_version: FORMAT_VERSION, pca, scaler })
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        self.scaler.apply(&self.pca.transform(data)?)
    }

    pub fn n_outputs(&self) -> usize {
        self.pca.k()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("preprocessor serializes") + "\n"
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: Self = serde_json::from_str(&text)
            .map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
        if model.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "{}: unsupported format_version {}",
                path.display(),
                model.format_version
            )));
        }
        Ok(model)
    }
}

/// Preprocessed splits ready for training.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedData {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
    pub preprocessor: Preprocessor,
    pub raw_features: usize,
}

impl PreparedData {
    /// Filters each split to classes 0/1, fits preprocessing on train, and
    /// applies it everywhere.
    pub fn from_raw(train: &Dataset, val: &Dataset, test: &Dataset, k: usize) -> Result<Self> {
        let [train, val, test] = [train, val, test].map(filter_first_two_classes);
        let (train, val, test) = (train?, val?, test?);
        for split in [&val, &test] {
            if split.n_features() != train.n_features() {
                return Err(Error::Dataset(format!(
                    "{} split has {} features, train has {}",
                    split.split,
                    split.n_features(),
                    train.n_features()
                )));
            }
        }
        let preprocessor = Preprocessor::fit(&train, k)?;
        Ok(Self {
            train: preprocessor.apply(&train)?,
            val: preprocessor.apply(&val)?,
            test: preprocessor.apply(&test)?,
            raw_features: train.n_features(),
            preprocessor,
        })
    }

    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let [train, val, test] =
            Split::ALL.map(|split| load_csv(split.path(&config.data_dir, &config.dataset), split));
        Self::from_raw(&train?, &val?, &test?, config.pca_k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub classes: [ClassMetrics; 2],
    pub predictions: Vec<u32>,
}

/// Classifies every row of `data`. With `shots`, `<Z>` is estimated from
/// that many measurements per sample, sample `i` drawing from its own
/// stream of `seed`.
pub fn evaluate_circuit(
    circuit: &Circuit,
    data: &Dataset,
    shots: Option<usize>,
    seed: u64,
) -> Result<Evaluation> {
    if data.n_features() != circuit.n_qubits() {
        return Err(Error::LengthMismatch { expected: circuit.n_qubits(), actual: data.n_features() });
    }
    let predictions: Vec<u32> = match shots {
        None => readout_dataset(circuit, data)?.iter().map(|r| u32::from(r.predicted_label)).collect(),
        Some(shots) => {
            use rayon::prelude::*;
            (0..data.len())
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream_rng(seed, Purpose::Shots, 0, i as u64);
                    run_and_classify_sampled(circuit, data.row(i), shots, &mut rng)
                        .map(|r| u32::from(r.predicted_label))
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(Evaluation {
        accuracy: accuracy(&predictions, data.labels())?,
        classes: class_report(&predictions, data.labels())?,
        predictions,
    })
}

/// `size` distinct row indices drawn from `seed`, ascending. Returns every
/// index when `size >= n`.
pub fn subset_indices(n: usize, size: usize, seed: u64) -> Vec<usize> {
    if size >= n {
        return (0..n).collect();
    }
    let mut rng = stream_rng(seed, Purpose::Subset, 0, 0);
    let mut picked = index::sample(&mut rng, n, size).into_vec();
    picked.sort_unstable();
    picked
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub circuit: Circuit,
    pub metrics: Vec<AccuracyRecord>,
    pub class_records: Vec<ClassRecord>,
    pub prune: PruneReport,
}

impl RunSummary {
    pub fn accuracy(&self, method: &str, split: &str) -> Option<f64> {
        self.metrics.iter().find(|r| r.method == method && r.split == split).map(|r| r.accuracy)
    }
}

fn shot_split_name(shots: usize) -> String {
    format!("test_subset_shots{shots}")
}

/// Loads the configured dataset and runs [`run_prepared`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let data = PreparedData::load(config)?;
    log::info!(
        "{}: {} train / {} val / {} test samples, {} raw features",
        config.dataset,
        data.train.len(),
        data.val.len(),
        data.test.len(),
        data.raw_features
    );
    run_prepared(config, &data)
}

/// Trains, evaluates and writes every artifact into `config.out`.
pub fn run_prepared(config: &ExperimentConfig, data: &PreparedData) -> Result<RunSummary> {
    config.validate()?;
    if data.preprocessor.n_outputs() != config.n_qubits {
        return Err(Error::Config(format!(
            "preprocessing yields {} features for {} qubits",
            data.preprocessor.n_outputs(),
            config.n_qubits
        )));
    }
    let mut files: Vec<(&str, String)> = Vec::new();
    let label = config.method_label();

    let models: Vec<(String, Circuit)> = match config.method {
        Method::Pso => {
            let fitness = make_fitness(&data.train, config.n_qubits, config.fitness)?;
            let result = optimize_with(fitness, &config.swarm(), |r| log::info!("{}", r.progress_line()))?;
            let circuit = decode_particle(&result.best_position, config.n_qubits)?;
            if circuit.len() != config.dims / 4 {
                return Err(Error::Invariant(format!(
                    "decoded {} gates from {} dimensions",
                    circuit.len(),
                    config.dims
                )));
            }
            let position: String = result.best_position.iter().map(|v| format!("{v}\n")).collect();
            files.push((BEST_POSITION, position));
            files.push((HISTORY, result.history_csv()));
            vec![(label, circuit)]
        }
        Method::Adam => {
            let result = train_baseline_with(&data.train, &data.val, &config.baseline(), |r| {
                log::info!(
                    "epoch={} train_loss={} train_acc={} val_loss={} val_acc={}",
                    r.epoch,
                    r.train_loss,
                    r.train_acc,
                    r.val_loss,
                    r.val_acc
                )
            })?;
            files.push((CIRCUIT_BEST_VAL, result.best_val_ansatz.circuit().to_text()));
            files.push((HISTORY, result.history_csv()));
            vec![(label, result.final_ansatz.circuit()), ("adam-best-val".into(), result.best_val_ansatz.circuit())]
        }
    };

    let mut metrics = Vec::new();
    let mut class_records = Vec::new();
    let record = |method: &str, split: String, accuracy: f64| AccuracyRecord {
        dataset: config.dataset.clone(),
        method: method.to_string(),
        split,
        accuracy,
    };
    let subset = config.shots.map(|_| data.test.select(&subset_indices(data.test.len(), config.shot_subset, config.seed)));
    for (method, circuit) in &models {
        let val = evaluate_circuit(circuit, &data.val, None, config.seed)?;
        let test = evaluate_circuit(circuit, &data.test, None, config.seed)?;
        metrics.push(record(method, Split::Validation.to_string(), val.accuracy));
        metrics.push(record(method, Split::Test.to_string(), test.accuracy));
        if let (Some(shots), Some(subset)) = (config.shots, &subset) {
            let exact = evaluate_circuit(circuit, subset, None, config.seed)?;
            let sampled = evaluate_circuit(circuit, subset, Some(shots), config.seed)?;
            metrics.push(record(method, "test_subset".into(), exact.accuracy));
            metrics.push(record(method, shot_split_name(shots), sampled.accuracy));
        }
        for (class, m) in test.classes.iter().enumerate() {
            class_records.push(ClassRecord {
                dataset: config.dataset.clone(),
                method: method.clone(),
                class: class as u32,
                precision: m.precision,
                recall: m.recall,
                f1: m.f1,
            });
        }
    }
    if let Some(bad) = metrics.iter().find(|r| !(0.0..=1.0).contains(&r.accuracy)) {
        return Err(Error::Invariant(format!("accuracy {} outside [0, 1]", bad.accuracy)));
    }

    let circuit = models[0].1.clone();
    let text = circuit.to_text();
    if Circuit::from_text(&text)? != circuit {
        return Err(Error::Invariant("circuit text does not round-trip".into()));
    }
    let prune = prune_dead_gates(&circuit, READOUT_QUBIT)?;
    check_pruned(&circuit, &prune.kept_circuit, &data.test)?;

    files.push((CIRCUIT, text));
    files.push((PREPROCESS, data.preprocessor.to_json()));
    files.push((METRICS, accuracy_csv(&metrics)));
    files.push((CLASS_REPORT, class_csv(&class_records)));
    files.push((PRUNE, prune.to_string()));
    files.push((MANIFEST, manifest(config, data, &files)));

    fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;
    for (name, contents) in &files {
        let path = config.out.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    }
    for m in &metrics {
        log::info!("{} {} accuracy={}", m.method, m.split, m.accuracy);
    }
    Ok(RunSummary { out_dir: config.out.clone(), circuit, metrics, class_records, prune })
}

/// The pruned circuit must reproduce `<Z>` on a sample of rows.
fn check_pruned(full: &Circuit, pruned: &Circuit, data: &Dataset) -> Result<()> {
    for row in data.rows().take(16) {
        let a = run_and_classify(full, row)?.expectation;
        let b = run_and_classify(pruned, row)?.expectation;
        if (a - b).abs() > 1e-10 {
            return Err(Error::Invariant(format!("pruning changed <Z> from {a} to {b}")));
        }
    }
    Ok(())
}

fn manifest(config: &ExperimentConfig, data: &PreparedData, files: &[(&str, String)]) -> String {
    let mut out = String::from("# swarmvqc run manifest; pass as --config to reproduce\n");
    out.push_str(&format!("format_version = {FORMAT_VERSION}\n"));
    out.push_str(&config.to_text());
    out.push_str(&format!("recorded.version = {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("recorded.raw_features = {}\n", data.raw_features));
    for d in [&data.train, &data.val, &data.test] {
        out.push_str(&format!("recorded.{}_samples = {}\n", d.split, d.len()));
    }
    let mut names: Vec<&str> = files.iter().map(|f| f.0).collect();
    names.push(MANIFEST);
    names.sort_unstable();
    out.push_str(&format!("recorded.artifacts = {}\n", names.join(" ")));
    out
}

/// Options for re-scoring a stored circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateRequest {
    pub run_dir: PathBuf,
    /// Defaults to `circuit.txt` in the run directory.
    pub circuit: Option<PathBuf>,
    pub split_csv: PathBuf,
    pub shots: Option<usize>,
    pub seed: u64,
    /// Evaluate only this many rows, drawn with [`subset_indices`].
    pub subset: Option<usize>,
}

/// Scores a circuit on a raw split file using the run's stored preprocessing.
pub fn evaluate_run(request: &EvaluateRequest) -> Result<Evaluation> {
    let preprocessor = Preprocessor::load(&request.run_dir.join(PREPROCESS))?;
    let circuit_path = request.circuit.clone().unwrap_or_else(|| request.run_dir.join(CIRCUIT));
    let text = fs::read_to_string(&circuit_path).map_err(|e| Error::io(&circuit_path, e))?;
    let circuit = Circuit::from_text(&text)?;
    if circuit.n_qubits() != preprocessor.n_outputs() {
        return Err(Error::LengthMismatch { expected: preprocessor.n_outputs(), actual: circuit.n_qubits() });
    }
    let raw = filter_first_two_classes(&load_csv(&request.split_csv, Split::Test)?)?;
    let mut data = preprocessor.apply(&raw)?;
    if let Some(size) = request.subset {
        data = data.select(&subset_indices(data.len(), size, request.seed));
    }
    evaluate_circuit(&circuit, &data, request.shots, request.seed)
}
