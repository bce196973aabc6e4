//! Experiment configuration as a flat `key = value` file.
//!
//! Blank lines and `#` comments are ignored. Keys prefixed `recorded.` are
//! informational (the manifest uses them for split sizes) and skipped on load.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::baseline::BaselineConfig;
use crate::data::FitnessMode;
use crate::error::{Error, Result};
use crate::pso::SwarmConfig;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pso,
    Adam,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pso" => Ok(Method::Pso),
            "adam" => Ok(Method::Adam),
            other => Err(Error::Config(format!("unknown method {other:?} (expected pso or adam)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Pso => "pso",
            Method::Adam => "adam",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub data_dir: PathBuf,
    pub method: Method,
    pub dims: usize,
    pub n_qubits: usize,
    pub pca_k: usize,
    pub particles: usize,
    pub iterations: usize,
    pub c1_start: f64,
    pub c1_end: f64,
    pub c2_start: f64,
    pub c2_end: f64,
    pub w_start: f64,
    pub w_end: f64,
    pub v_max: f64,
    pub fitness: FitnessMode,
    pub layers: usize,
    pub lr: f64,
    pub batch: usize,
    pub epochs: usize,
    pub shots: Option<usize>,
    pub shot_subset: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let swarm = SwarmConfig::default();
        let adam = BaselineConfig::default();
        Self {
            dataset: String::new(),
            data_dir: PathBuf::from("data"),
            method: Method::Pso,
            dims: swarm.dimensions,
            n_qubits: 8,
            pca_k: 8,
            particles: swarm.n_particles,
            iterations: swarm.iterations,
            c1_start: swarm.c1_start,
            c1_end: swarm.c1_end,
            c2_start: swarm.c2_start,
            c2_end: swarm.c2_end,
            w_start: swarm.w_start,
            w_end: swarm.w_end,
            v_max: swarm.v_max,
            fitness: FitnessMode::ErrorRate,
            layers: adam.n_layers,
            lr: adam.learning_rate,
            batch: adam.batch_size,
            epochs: adam.epochs,
            shots: None,
            shot_subset: 100,
            seed: 0,
            out: PathBuf::from("runs/latest"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "dataset" => self.dataset = v.to_string(),
            "data_dir" => self.data_dir = PathBuf::from(v),
            "method" => self.method = v.parse()?,
            "dims" => self.dims = parse(key, v)?,
            "n_qubits" => self.n_qubits = parse(key, v)?,
            "pca_k" => self.pca_k = parse(key, v)?,
            "particles" => self.particles = parse(key, v)?,
            "iterations" => self.iterations = parse(key, v)?,
            "c1_start" => self.c1_start = parse(key, v)?,
            "c1_end" => self.c1_end = parse(key, v)?,
            "c2_start" => self.c2_start = parse(key, v)?,
            "c2_end" => self.c2_end = parse(key, v)?,
            "w_start" => self.w_start = parse(key, v)?,
            "w_end" => self.w_end = parse(key, v)?,
            "v_max" => self.v_max = parse(key, v)?,
            "fitness" => self.fitness = v.parse()?,
            "layers" => self.layers = parse(key, v)?,
            "lr" => self.lr = parse(key, v)?,
            "batch" => self.batch = parse(key, v)?,
            "epochs" => self.epochs = parse(key, v)?,
            "shots" => {
                self.shots = match v {
                    "" | "none" => None,
                    _ => Some(parse(key, v)?),
                }
            }
            "shot_subset" => self.shot_subset = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "format_version" => {
                let version: u32 = parse(key, v)?;
                if version != FORMAT_VERSION {
                    return Err(Error::Config(format!("unsupported format_version {version}")));
                }
            }
            k if k.starts_with("recorded.") => {}
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::default();
        config.merge_text(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.dataset.is_empty() {
            return bad("dataset name is required".into());
        }
        if self.method == Method::Pso && (self.dims == 0 || !self.dims.is_multiple_of(4)) {
            return bad(format!("dims = {} must be a positive multiple of 4", self.dims));
        }
        if self.pca_k != self.n_qubits {
            return bad(format!("pca_k ({}) must equal n_qubits ({})", self.pca_k, self.n_qubits));
        }
        if self.shots == Some(0) || self.shot_subset == 0 {
            return bad("shots and shot_subset must be positive".into());
        }
        match self.method {
            Method::Pso => self.swarm().validate(),
            Method::Adam => {
                if self.n_qubits < 2 || self.layers == 0 || self.batch == 0 || self.epochs == 0 {
                    return bad("adam needs n_qubits >= 2 and positive layers, batch, epochs".into());
                }
                if !(self.lr >= 0.0 && self.lr.is_finite()) {
                    return bad(format!("lr = {} must be a finite non-negative number", self.lr));
                }
                Ok(())
            }
        }
    }

    pub fn swarm(&self) -> SwarmConfig {
        SwarmConfig {
            n_particles: self.particles,
            dimensions: self.dims,
            iterations: self.iterations,
            c1_start: self.c1_start,
            c1_end: self.c1_end,
            c2_start: self.c2_start,
            c2_end: self.c2_end,
            w_start: self.w_start,
            w_end: self.w_end,
            v_max: self.v_max,
            seed: self.seed,
        }
    }

    pub fn baseline(&self) -> BaselineConfig {
        BaselineConfig {
            n_qubits: self.n_qubits,
            n_layers: self.layers,
            epochs: self.epochs,
            batch_size: self.batch,
            learning_rate: self.lr,
            seed: self.seed,
        }
    }

    /// Method label used in metrics files, e.g. `pso-40` or `adam`.
    pub fn method_label(&self) -> String {
        match self.method {
            Method::Pso => format!("pso-{}", self.dims),
            Method::Adam => "adam".to_string(),
        }
    }

    /// Serializes every field; `merge_text` of the output restores `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("dataset", &self.dataset);
        kv("data_dir", &self.data_dir.display());
        kv("method", &self.method);
        kv("dims", &self.dims);
        kv("n_qubits", &self.n_qubits);
        kv("pca_k", &self.pca_k);
        kv("particles", &self.particles);
        kv("iterations", &self.iterations);
        kv("c1_start", &self.c1_start);
        kv("c1_end", &self.c1_end);
        kv("c2_start", &self.c2_start);
        kv("c2_end", &self.c2_end);
        kv("w_start", &self.w_start);
        kv("w_end", &self.w_end);
        kv("v_max", &self.v_max);
        kv("fitness", &self.fitness);
        kv("layers", &self.layers);
        kv("lr", &self.lr);
        kv("batch", &self.batch);
        kv("epochs", &self.epochs);
        match self.shots {
            Some(s) => kv("shots", &s),
            None => kv("shots", &"none"),
        }
        kv("shot_subset", &self.shot_subset);
        kv("seed", &self.seed);
        kv("out", &self.out.display());
        out
    }
}
