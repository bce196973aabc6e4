//! Gates, circuits, and the particle-position decoder.
//!
//! A particle position is a vector in `[0, 1]^d` read in groups of four slots
//! `(gate, target, control, angle)`. Each group decodes to one gate, so a
//! position of length `d` always yields exactly `d / 4` gates, applied in group
//! order.
//!
//! Slot discretization uses `round(1 + count * value)` clamped to `1..=count`;
//! the clamp only matters at `value = 1.0`, where the unclamped formula
//! overflows by one. A decoded CNOT whose control lands on its target has the
//! control shifted to `(control + 1) % n_qubits`, so circuit length never
//! depends on the slot values.

use std::f64::consts::TAU;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Slots per decoded gate.
pub const SLOTS_PER_GATE: usize = 4;

/// Tolerance applied to position components before they are rejected.
pub const POSITION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn mnemonic(self) -> &'static str {
        match self {
            Axis::X => "RX",
            Axis::Y => "RY",
            Axis::Z => "RZ",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Single-qubit rotation `exp(-i * angle * P / 2)` about the Pauli axis `P`.
    Rotation { axis: Axis, target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn rx(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::X, target, angle }
    }

    pub fn ry(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::Y, target, angle }
    }

    pub fn rz(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::Z, target, angle }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Rotation { target, .. } | Gate::Cnot { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Cnot { control, .. } => Some(control),
            Gate::Rotation { .. } => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rotation { angle, .. } => Some(angle),
            Gate::Cnot { .. } => None,
        }
    }

    /// Checks qubit bounds, CNOT distinctness, and angle finiteness.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |index: usize| {
            if index < n_qubits {
                Ok(())
            } else {
                Err(Error::QubitOutOfRange { index, n_qubits })
            }
        };
        match *self {
            Gate::Rotation { target, angle, .. } => {
                check(target)?;
                if !angle.is_finite() {
                    return Err(Error::InvalidGate(format!("non-finite angle {angle}")));
                }
            }
            Gate::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::InvalidGate(format!(
                        "CNOT control and target are both qubit {target}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidGate("a circuit needs at least one qubit".into()));
        }
        for gate in &gates {
            gate.validate(n_qubits)?;
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn empty(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Serializes to the line-oriented circuit text format.
    ///
    /// Angles use the shortest decimal representation that parses back to the
    /// same `f64`, so `from_text(to_text(c)) == c` holds exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.n_qubits);
        for gate in &self.gates {
            match *gate {
                Gate::Rotation { axis, target, angle } => {
                    let _ = writeln!(out, "{} {} {}", axis.mnemonic(), target, angle);
                }
                Gate::Cnot { control, target } => {
                    let _ = writeln!(out, "CNOT {control} {target}");
                }
            }
        }
        out
    }

    /// Parses the circuit text format. Errors carry the 1-based line number.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_qubits: Option<usize> = None;
        let mut gates = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let tokens: Vec<&str> = line.split_whitespace().collect();

            let Some(n) = n_qubits else {
                match tokens.as_slice() {
                    ["qubits", n] => {
                        let n: usize = n
                            .parse()
                            .map_err(|_| err(format!("invalid qubit count {n:?}")))?;
                        if n == 0 {
                            return Err(err("qubit count must be positive".into()));
                        }
                        n_qubits = Some(n);
                        continue;
                    }
                    _ => return Err(err("expected `qubits <n>` header".into())),
                }
            };

            let qubit = |token: &str| -> Result<usize> {
                let q: usize = token
                    .parse()
                    .map_err(|_| err(format!("invalid qubit index {token:?}")))?;
                if q >= n {
                    return Err(err(format!("qubit index {q} out of range for {n} qubit(s)")));
                }
                Ok(q)
            };
            let angle = |token: &str| -> Result<f64> {
                match token.parse::<f64>() {
                    Ok(a) if a.is_finite() => Ok(a),
                    _ => Err(err(format!("invalid angle {token:?}"))),
                }
            };

            let gate = match tokens.as_slice() {
                ["RX", t, a] => Gate::rx(qubit(t)?, angle(a)?),
                ["RY", t, a] => Gate::ry(qubit(t)?, angle(a)?),
                ["RZ", t, a] => Gate::rz(qubit(t)?, angle(a)?),
                ["CNOT", c, t] => {
                    let (c, t) = (qubit(c)?, qubit(t)?);
                    if c == t {
                        return Err(err(format!("CNOT control equals target ({c})")));
                    }
                    Gate::cnot(c, t)
                }
                _ => return Err(err(format!("unrecognized gate line {line:?}"))),
            };
            gates.push(gate);
        }

        let n_qubits = n_qubits.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `qubits <n>` header".into(),
        })?;
        Self::new(n_qubits, gates)
    }

    /// OpenQASM 2.0 rendering of the circuit (gates only, no measurement).
    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        let _ = writeln!(out, "qreg q[{}];", self.n_qubits);
        for gate in &self.gates {
            match *gate {
                Gate::Rotation { axis, target, angle } => {
                    let name = match axis {
                        Axis::X => "rx",
                        Axis::Y => "ry",
                        Axis::Z => "rz",
                    };
                    let _ = writeln!(out, "{name}({angle}) q[{target}];");
                }
                Gate::Cnot { control, target } => {
                    let _ = writeln!(out, "cx q[{control}],q[{target}];");
                }
            }
        }
        out
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Circuit::from_text(s)
    }
}

/// A validated point of the search space: components in `[0, 1]`, length a
/// multiple of four.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticlePosition(Vec<f64>);

impl ParticlePosition {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_position(&values)?;
        Ok(Self(values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn decode(&self, n_qubits: usize) -> Result<Circuit> {
        decode_particle(&self.0, n_qubits)
    }
}

fn validate_position(values: &[f64]) -> Result<()> {
    if !values.len().is_multiple_of(SLOTS_PER_GATE) {
        return Err(Error::InvalidPosition(format!(
            "length {} is not a multiple of {SLOTS_PER_GATE}",
            values.len()
        )));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| {
        !(-POSITION_TOLERANCE..=1.0 + POSITION_TOLERANCE).contains(*v)
    }) {
        return Err(Error::InvalidPosition(format!("component {i} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Maps a slot value in `[0, 1]` onto `1..=count`.
///
/// `f64::round` rounds half away from zero, so `2.5 -> 3`.
fn discretize(value: f64, count: usize) -> usize {
    let v = (1.0 + count as f64 * value.clamp(0.0, 1.0)).round();
    (v as usize).clamp(1, count)
}

/// Decodes a particle position into a circuit of exactly `len / 4` gates.
///
/// Gate slot order is RX, RY, RZ, CNOT. Qubit slots are converted to 0-based
/// indices. The control slot is only read for CNOT and the angle slot only for
/// rotations.
pub fn decode_particle(position: &[f64], n_qubits: usize) -> Result<Circuit> {
    if n_qubits == 0 {
        return Err(Error::InvalidPosition("n_qubits must be positive".into()));
    }
    validate_position(position)?;

    let gates = position
        .chunks_exact(SLOTS_PER_GATE)
        .map(|slots| {
            let (kind, target, control, angle) = (slots[0], slots[1], slots[2], slots[3]);
            let target = discretize(target, n_qubits) - 1;
            let angle = TAU * angle.clamp(0.0, 1.0);
            match discretize(kind, 4) {
                1 => Gate::rx(target, angle),
                2 => Gate::ry(target, angle),
                3 => Gate::rz(target, angle),
                _ => {
                    let mut control = discretize(control, n_qubits) - 1;
                    if control == target {
                        control = (control + 1) % n_qubits;
                    }
                    Gate::cnot(control, target)
                }
            }
        })
        .collect::<Vec<_>>();

    // Fails for a CNOT on a single-qubit register.
    Circuit::new(n_qubits, gates)
}
