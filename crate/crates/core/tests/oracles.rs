#![allow(clippy::needless_range_loop)]

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swarmvqc::baseline::{loss, parameter_shift_gradient, FixedAnsatz};
use swarmvqc::data::{load_csv, Dataset, PcaModel, Split};
use swarmvqc::pso::{optimize, SwarmConfig};
use swarmvqc::{decode_particle, Gate, Statevector};

use common::jacobi_eigen;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m) = (rows.len(), rows[0].len());
    let mean: Vec<f64> = (0..m).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    (0..m)
        .map(|a| {
            (0..m)
                .map(|b| rows.iter().map(|r| (r[a] - mean[a]) * (r[b] - mean[b])).sum::<f64>() / (n - 1) as f64)
                .collect()
        })
        .collect()
}

#[test]
fn pca_matches_jacobi_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows = random_matrix(&mut rng, 50, 10);
    let data = Dataset::from_rows(&rows, vec![0; 50], Split::Train).unwrap();
    let model = PcaModel::fit(&data, 8).unwrap();

    let (values, vectors) = jacobi_eigen(&covariance(&rows));
    let mut order: Vec<usize> = (0..10).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    for (k, &idx) in order.iter().take(8).enumerate() {
        let mut v: Vec<f64> = (0..10).map(|i| vectors[i][idx]).collect();
        let lead = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        assert!((model.explained_variance[k] - values[idx]).abs() < 1e-8);
        for (a, b) in model.components[k].iter().zip(&v) {
            assert!((a - b).abs() < 1e-8, "component {k}: {a} vs {b}");
        }
    }

    let projected = model.transform(&data).unwrap();
    let rows_out: Vec<Vec<f64>> = projected.rows().map(<[f64]>::to_vec).collect();
    let cov = covariance(&rows_out);
    for a in 0..8 {
        assert!((cov[a][a] - model.explained_variance[a]).abs() < 1e-8);
        for b in 0..8 {
            if a != b {
                assert!(cov[a][b].abs() < 1e-6, "cov[{a}][{b}] = {}", cov[a][b]);
            }
        }
    }
}

#[test]
fn pca_reconstruction_error_is_non_increasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows = random_matrix(&mut rng, 30, 6);
    let data = Dataset::from_rows(&rows, vec![0; 30], Split::Train).unwrap();
    let mut previous = f64::INFINITY;
    for k in 1..=6 {
        let model = PcaModel::fit(&data, k).unwrap();
        let err: f64 = rows
            .iter()
            .map(|r| {
                let z = model.project(r).unwrap();
                (0..6)
                    .map(|j| {
                        let back = model.mean[j] + (0..k).map(|c| z[c] * model.components[c][j]).sum::<f64>();
                        (r[j] - back).powi(2)
                    })
                    .sum::<f64>()
            })
            .sum();
        assert!(err <= previous + 1e-9, "k={k}: {err} > {previous}");
        previous = err;
    }
    assert!(previous < 1e-20);
}

fn central_difference(ansatz: &FixedAnsatz, batch: &Dataset, h: f64) -> Vec<f64> {
    (0..ansatz.n_params())
        .map(|k| {
            let mut plus = ansatz.params.clone();
            plus[k] += h;
            let mut minus = ansatz.params.clone();
            minus[k] -= h;
            let f = |p: Vec<f64>| loss(&ansatz.with_params(p).unwrap(), batch).unwrap();
            (f(plus) - f(minus)) / (2.0 * h)
        })
        .collect()
}

#[test]
fn shift_gradient_matches_finite_differences_on_batches() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let ansatz = FixedAnsatz::new(4, 3, (0..12).map(|_| rng.random_range(0.0..2.0 * PI)).collect()).unwrap();
        let rows: Vec<Vec<f64>> = (0..6).map(|_| common::random_features(&mut rng, 4)).collect();
        let labels = (0..6).map(|i| i % 2).collect();
        let batch = Dataset::from_rows(&rows, labels, Split::Train).unwrap();
        let exact = parameter_shift_gradient(&ansatz, &batch).unwrap();
        let numeric = central_difference(&ansatz, &batch, 1e-5);
        for (a, b) in exact.iter().zip(&numeric) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}

fn plus_state() -> Statevector {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Statevector::from_amplitudes(vec![h, h]).unwrap()
}

#[test]
fn shot_estimates_of_balanced_state() {
    let state = plus_state();
    let within = (0..1000u64)
        .filter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            state.sample_expectation(0, 1024, &mut rng).unwrap().abs() <= 0.1
        })
        .count();
    assert!(within >= 990, "{within} of 1000 seeds within 0.1");
}

#[test]
fn shot_noise_scales_as_inverse_sqrt() {
    let state = plus_state();
    let spread = |shots: usize| {
        let estimates: Vec<f64> = (0..400u64)
            .map(|seed| state.sample_expectation(0, shots, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap())
            .collect();
        let mean = estimates.iter().sum::<f64>() / 400.0;
        (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 399.0).sqrt()
    };
    // binomial standard deviation of the estimate is 1 / sqrt(shots) at p = 1/2
    for shots in [64, 1024] {
        let s = spread(shots);
        let expected = 1.0 / (shots as f64).sqrt();
        assert!((s / expected - 1.0).abs() < 0.15, "shots={shots}: {s} vs {expected}");
    }
}

/// A plain global-best PSO written independently of the library, with the
/// same schedules, clamping and synchronous update.
fn reference_pso(dims: usize, seed: u64) -> f64 {
    let f = |x: &[f64]| x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (n, iters, vmax) = (50, 100, 0.2);
    let mut x: Vec<Vec<f64>> = (0..n).map(|_| (0..dims).map(|_| rng.random()).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|_| (0..dims).map(|_| rng.random_range(-vmax..vmax)).collect()).collect();
    let mut pbest = x.clone();
    let mut pbest_f: Vec<f64> = x.iter().map(|p| f(p)).collect();
    let mut g = pbest_f.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    for t in 0..iters {
        let frac = t as f64 / (iters - 1) as f64;
        let w = 0.9 - 0.5 * frac;
        let c1 = 2.5 - 2.0 * frac;
        let c2 = 0.5 + 2.0 * frac;
        let gbest = pbest[g].clone();
        for i in 0..n {
            for j in 0..dims {
                let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                v[i][j] = (w * v[i][j] + c1 * r1 * (pbest[i][j] - x[i][j]) + c2 * r2 * (gbest[j] - x[i][j]))
                    .clamp(-vmax, vmax);
                x[i][j] = (x[i][j] + v[i][j]).clamp(0.0, 1.0);
            }
            let fx = f(&x[i]);
            if fx < pbest_f[i] {
                pbest_f[i] = fx;
                pbest[i] = x[i].clone();
            }
        }
        g = pbest_f.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    }
    pbest_f[g]
}

#[test]
fn sphere_results_agree_with_reference_swarm() {
    let sphere = |x: &[f64]| Ok(x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>());
    let median = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let ours: Vec<f64> =
        (0..5).map(|seed| optimize(sphere, &SwarmConfig { seed, ..Default::default() }).unwrap().best_fitness).collect();
    let reference: Vec<f64> = (0..5).map(|seed| reference_pso(40, seed)).collect();
    // uniform start sits near 40/12; both routes should end three orders lower
    for v in ours.iter().chain(&reference) {
        assert!((1e-4..1e-2).contains(v), "ours {ours:?}, reference {reference:?}");
    }
    let ratio = median(ours.clone()) / median(reference.clone());
    assert!((1.0 / 3.0..3.0).contains(&ratio), "ours {ours:?}, reference {reference:?}");
}

/// Zero iff the 4-slot particle decodes to RX on qubit 0 of 8 with an angle
/// within `FRAC_PI_4` of π/2.
fn needle(position: &[f64]) -> swarmvqc::Result<f64> {
    let circuit = decode_particle(position, 8)?;
    Ok(match circuit.gates()[0] {
        Gate::Rotation { axis: swarmvqc::Axis::X, target: 0, angle } if (angle - FRAC_PI_2).abs() < FRAC_PI_4 => 0.0,
        _ => 1.0,
    })
}

#[test]
fn needle_region_measure() {
    // gate slot < 1/8, target slot < 1/16, angle slot within 1/8 of 1/4
    let steps = 64;
    let mut hits = 0usize;
    for g in 0..steps {
        for t in 0..steps {
            for a in 0..steps {
                let p = [(g as f64 + 0.5) / steps as f64, (t as f64 + 0.5) / steps as f64, 0.5, (a as f64 + 0.5) / steps as f64];
                hits += usize::from(needle(&p).unwrap() == 0.0);
            }
        }
    }
    let measure = hits as f64 / (steps * steps * steps) as f64;
    let expected = (1.0 / 8.0) * (1.0 / 16.0) * 0.25;
    assert!((measure - expected).abs() < 1e-12, "{measure} vs {expected}");
}

#[test]
fn needle_search_reports_genuine_hits() {
    // The landscape is flat outside the needle, so the swarm has nothing to
    // follow and behaves like a biased random search. Hits are rare.
    let mut found = Vec::new();
    for seed in 0..10 {
        let config = SwarmConfig { dimensions: 4, seed, ..Default::default() };
        let result = optimize(needle, &config).unwrap();
        assert_eq!(optimize(needle, &config).unwrap(), result);
        if result.best_fitness == 0.0 {
            let first_hit = result.history.iter().position(|r| r.gbest_fitness == 0.0).unwrap();
            assert_eq!(needle(&result.best_position).unwrap(), 0.0);
            found.push((seed, first_hit));
        }
    }
    assert!(!found.is_empty(), "needle never found");
    println!("needle found (seed, iteration): {found:?}");
}

#[test]
fn mnist_fixture_matches_grammar() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    for split in Split::ALL {
        let data = load_csv(split.path(&dir, "mnist01"), split).unwrap();
        assert_eq!(data.n_features(), 784);
        assert!(data.features().iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(data.labels().iter().all(|&y| y <= 1));
    }
}
