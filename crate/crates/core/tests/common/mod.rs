//! Reference implementations used to cross-check the library.
#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;
use rand::Rng;
use swarmvqc::{Axis, Circuit, Gate};

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim).map(|i| (0..dim).map(|j| c(f64::from(u8::from(i == j)), 0.0)).collect()).collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Single-qubit rotation written out from `exp(-i θ P / 2) = cos(θ/2) I - i sin(θ/2) P`.
pub fn rotation(axis: Axis, theta: f64) -> Matrix {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let pauli: Matrix = match axis {
        Axis::X => vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
        Axis::Y => vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]],
        Axis::Z => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]],
    };
    let id = identity(2);
    (0..2)
        .map(|i| (0..2).map(|j| id[i][j] * cs - c(0.0, 1.0) * pauli[i][j] * sn).collect())
        .collect()
}

/// Full `2^n` operator for one gate; qubit `q` is bit `q` of the basis index,
/// so the leftmost Kronecker factor acts on qubit `n - 1`.
pub fn gate_matrix(gate: &Gate, n: usize) -> Matrix {
    match *gate {
        Gate::Rotation { axis, target, angle } => {
            let mut full = vec![vec![c(1.0, 0.0)]];
            for q in (0..n).rev() {
                let factor = if q == target { rotation(axis, angle) } else { identity(2) };
                full = kron(&full, &factor);
            }
            full
        }
        Gate::Cnot { control, target } => {
            let dim = 1 << n;
            let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
            for i in 0..dim {
                let j = if i >> control & 1 == 1 { i ^ (1 << target) } else { i };
                m[j][i] = c(1.0, 0.0);
            }
            m
        }
    }
}

pub fn circuit_unitary(circuit: &Circuit) -> Matrix {
    let n = circuit.n_qubits();
    circuit.gates().iter().fold(identity(1 << n), |acc, g| matmul(&gate_matrix(g, n), &acc))
}

/// Final state from encoding `features` with RY and running `circuit`,
/// computed with dense matrices only.
pub fn dense_simulate(circuit: &Circuit, features: &[f64]) -> Vec<Complex64> {
    let n = circuit.n_qubits();
    let mut state = vec![c(0.0, 0.0); 1 << n];
    state[0] = c(1.0, 0.0);
    for (q, &x) in features.iter().enumerate() {
        state = matvec(&gate_matrix(&Gate::ry(q, x), n), &state);
    }
    matvec(&circuit_unitary(circuit), &state)
}

pub fn dense_expectation_z0(state: &[Complex64]) -> f64 {
    state.iter().enumerate().map(|(i, a)| if i & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() }).sum()
}

pub fn random_gate<R: Rng>(rng: &mut R, n: usize) -> Gate {
    let target = rng.random_range(0..n);
    let kind = if n > 1 { rng.random_range(0..4) } else { rng.random_range(0..3) };
    let angle = rng.random_range(-std::f64::consts::TAU..std::f64::consts::TAU);
    match kind {
        0 => Gate::rx(target, angle),
        1 => Gate::ry(target, angle),
        2 => Gate::rz(target, angle),
        _ => {
            let control = (target + rng.random_range(1..n)) % n;
            Gate::cnot(control, target)
        }
    }
}

pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, max_gates: usize) -> Circuit {
    let len = rng.random_range(0..=max_gates);
    Circuit::new(n, (0..len).map(|_| random_gate(rng, n)).collect()).unwrap()
}

pub fn random_features<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..=std::f64::consts::PI)).collect()
}

/// Cyclic Jacobi eigenvalue iteration on a symmetric matrix. Returns
/// eigenvalues and eigenvectors (as columns of the second value, `v[i][k]`
/// being entry `i` of vector `k`).
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = cs * vkp - sn * vkq;
                    v[k][q] = sn * vkp + cs * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}
