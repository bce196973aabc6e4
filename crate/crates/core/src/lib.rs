//! Particle swarm search over variational quantum classifier circuits.
//!
//! A particle is a flat vector in `[0, 1]^d`; every four coordinates decode to
//! one gate (kind, target, control, angle). Circuits run on an exact
//! statevector simulator after angle-encoding the input features with `RY`,
//! and the class is read from `<Z>` on qubit 0. A fixed-ansatz model trained
//! with Adam on parameter-shift gradients serves as the comparison point.
//!
//! ```
//! use swarmvqc::{decode_particle, run_and_classify};
//!
//! let circuit = decode_particle(&[0.0, 0.0, 0.0, 0.5], 2).unwrap();
//! assert_eq!(circuit.to_text(), "qubits 2\nRX 0 3.141592653589793\n");
//! let readout = run_and_classify(&circuit, &[0.0, 0.0]).unwrap();
//! assert_eq!(readout.predicted_label, 1);
//! ```

pub mod analysis;
pub mod baseline;
pub mod circuit;
pub mod data;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod pso;
pub mod rng;
pub mod sim;

pub use analysis::{effective_gate_count, prune_dead_gates, PruneReport};
pub use baseline::{build_fixed_ansatz, train_baseline, BaselineConfig, BaselineResult, FixedAnsatz};
pub use circuit::{decode_particle, Axis, Circuit, Gate, ParticlePosition};
pub use data::{Dataset, FitnessMode, Split};
pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentConfig, Method};
pub use metrics::{accuracy, class_report, ClassMetrics};
pub use pso::{optimize, SwarmConfig, SwarmResult};
pub use sim::{run_and_classify, ReadoutResult, Statevector};
