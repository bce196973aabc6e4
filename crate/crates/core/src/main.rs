use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swarmvqc::analysis::prune_dead_gates;
use swarmvqc::data::synthetic::TwoGaussians;
use swarmvqc::data::{write_csv, Split};
use swarmvqc::harness::{evaluate_run, run_experiment, EvaluateRequest, ExperimentConfig, Method, METRICS};
use swarmvqc::metrics::{pivot_accuracy, read_accuracy_csv, render_results_table};
use swarmvqc::sim::READOUT_QUBIT;
use swarmvqc::{Circuit, Error, Result};

#[derive(Parser)]
#[command(name = "swarmvqc", version, about = "Particle swarm search for quantum classifier circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search circuit structure with the particle swarm.
    TrainPso(TrainArgs),
    /// Train the fixed ansatz with Adam.
    TrainAdam(TrainArgs),
    /// Train with the method named by --method or the config file.
    Train(TrainArgs),
    /// Score a stored circuit on a split file.
    Evaluate(EvaluateArgs),
    /// Print the light-cone pruning report for a circuit file.
    Prune {
        circuit: PathBuf,
        #[arg(long, default_value_t = READOUT_QUBIT)]
        readout: usize,
    },
    /// Convert a circuit file to OpenQASM 2.0.
    ExportQasm {
        circuit: PathBuf,
        /// Output path; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Aggregate run metrics into a dataset-by-method table.
    Report {
        /// Run directories or metrics CSV files.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "test")]
        split: String,
    },
    /// Write two-Gaussian benchmark splits in the dataset CSV format.
    Synth {
        #[arg(long, default_value = "synthetic")]
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        features: usize,
        #[arg(long, default_value_t = 6.0)]
        separation: f64,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any other config key, e.g. `--set iterations=50`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl TrainArgs {
    fn resolve(&self, forced: Option<Method>) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(m) = forced {
            config.method = m;
        }
        for entry in &self.overrides {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {entry:?}")))?;
            config.set(key, value)?;
        }
        if let Some(v) = &self.dataset {
            config.dataset = v.clone();
        }
        if let Some(v) = &self.data_dir {
            config.data_dir = v.clone();
        }
        if let Some(v) = &self.method {
            let method: Method = v.parse()?;
            if forced.is_some_and(|m| m != method) {
                return Err(Error::Config(format!("--method {method} contradicts the subcommand")));
            }
            config.method = method;
        }
        if let Some(v) = self.dims {
            config.dims = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.shots {
            config.shots = Some(v);
        }
        if let Some(v) = &self.out {
            config.out = v.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct EvaluateArgs {
    /// Run directory holding preprocess.json.
    #[arg(long)]
    run: PathBuf,
    /// Circuit file; defaults to the run's circuit.txt.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Raw split CSV to score.
    #[arg(long)]
    split: PathBuf,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Score only this many rows, drawn from the seed.
    #[arg(long)]
    subset: Option<usize>,
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    Circuit::from_text(&text)
}

fn train(args: &TrainArgs, forced: Option<Method>) -> Result<()> {
    let config = args.resolve(forced)?;
    let summary = run_experiment(&config)?;
    print!("{}", swarmvqc::metrics::accuracy_csv(&summary.metrics));
    eprintln!("artifacts written to {}", summary.out_dir.display());
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    if args.shots == Some(0) {
        return Err(Error::Config("--shots must be positive".into()));
    }
    let eval = evaluate_run(&EvaluateRequest {
        run_dir: args.run.clone(),
        circuit: args.circuit.clone(),
        split_csv: args.split.clone(),
        shots: args.shots,
        seed: args.seed,
        subset: args.subset,
    })?;
    println!("samples = {}", eval.predictions.len());
    println!("accuracy = {}", eval.accuracy);
    for (class, m) in eval.classes.iter().enumerate() {
        println!("class {class}: precision = {} recall = {} f1 = {}", m.precision, m.recall, m.f1);
    }
    Ok(())
}

fn report(runs: &[PathBuf], split: &str) -> Result<()> {
    let mut records = Vec::new();
    for run in runs {
        let path = if run.is_dir() { run.join(METRICS) } else { run.clone() };
        records.extend(read_accuracy_csv(&path)?);
    }
    let (methods, rows) = pivot_accuracy(&records, split);
    print!("{}", render_results_table(&methods, &rows)?);
    Ok(())
}

fn synth(name: &str, out: &Path, seed: u64, features: usize, separation: f64) -> Result<()> {
    let spec = TwoGaussians { n_features: features, separation, seed, ..Default::default() };
    fs::create_dir_all(out).map_err(|e| Error::Io { path: out.into(), source: e })?;
    for (split, data) in Split::ALL.into_iter().zip(spec.generate()?) {
        write_csv(&data, split.path(out, name))?;
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("SWARMVQC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("SWARMVQC_THREADS must be a non-negative integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::TrainPso(args) => train(&args, Some(Method::Pso)),
        Command::TrainAdam(args) => train(&args, Some(Method::Adam)),
        Command::Train(args) => train(&args, None),
        Command::Evaluate(args) => evaluate(&args),
        Command::Prune { circuit, readout } => {
            print!("{}", prune_dead_gates(&read_circuit(&circuit)?, readout)?);
            Ok(())
        }
        Command::ExportQasm { circuit, output } => {
            let qasm = read_circuit(&circuit)?.to_qasm();
            match output {
                Some(path) => fs::write(&path, qasm).map_err(|e| Error::Io { path, source: e }),
                None => {
                    print!("{qasm}");
                    Ok(())
                }
            }
        }
        Command::Report { runs, split } => report(&runs, &split),
        Command::Synth { name, out, seed, features, separation } => {
            synth(&name, &out, seed, features, separation)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
