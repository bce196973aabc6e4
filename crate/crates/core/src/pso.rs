//! Particle swarm optimization over the unit hypercube with linearly
//! time-varying cognitive (`c1`), social (`c2`), and inertia (`w`) weights.
//!
//! The swarm is synchronous: all particles are evaluated against the global
//! best settled at the end of the previous iteration, and personal/global
//! bests are reduced in particle-index order. Fitness is minimized.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Purpose};

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub n_particles: usize,
    pub dimensions: usize,
    pub iterations: usize,
    pub c1_start: f64,
    pub c1_end: f64,
    pub c2_start: f64,
    pub c2_end: f64,
    pub w_start: f64,
    pub w_end: f64,
    /// Velocity clamp as a fraction of the unit domain width.
    pub v_max: f64,
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            n_particles: 50,
            dimensions: 40,
            iterations: 100,
            c1_start: 2.5,
            c1_end: 0.5,
            c2_start: 0.5,
            c2_end: 2.5,
            w_start: 0.9,
            w_end: 0.4,
            v_max: 0.2,
            seed: 0,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.n_particles == 0 || self.dimensions == 0 || self.iterations == 0 {
            return bad("particles, dimensions and iterations must be positive");
        }
        if !(self.v_max > 0.0 && self.v_max <= 1.0) {
            return bad("v_max must lie in (0, 1]");
        }
        let all = [self.c1_start, self.c1_end, self.c2_start, self.c2_end, self.w_start, self.w_end];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("schedule endpoints must be finite");
        }
        if self.c1_start < self.c1_end {
            return bad("c1 must not increase (c1_start >= c1_end)");
        }
        if self.c2_start > self.c2_end {
            return bad("c2 must not decrease (c2_start <= c2_end)");
        }
        if self.w_start < self.w_end {
            return bad("w must not increase (w_start >= w_end)");
        }
        Ok(())
    }

    pub fn coefficients(&self, iteration: usize) -> Coefficients {
        let at = |start, end| schedule(start, end, iteration, self.iterations);
        Coefficients {
            c1: at(self.c1_start, self.c1_end),
            c2: at(self.c2_start, self.c2_end),
            w: at(self.w_start, self.w_end),
        }
    }
}

/// Linear interpolation from `start` (iteration 0) to `end` (last iteration).
pub fn schedule(start: f64, end: f64, iteration: usize, total: usize) -> f64 {
    if total <= 1 {
        return start;
    }
    start + (end - start) * iteration as f64 / (total - 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub c1: f64,
    pub c2: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

impl ParticleState {
    /// Uniform position in `[0, 1]^d`, uniform velocity in `[-v_max, v_max]^d`.
    pub fn random<R: Rng + ?Sized>(dimensions: usize, v_max: f64, rng: &mut R) -> Self {
        let position: Vec<f64> = (0..dimensions).map(|_| rng.random::<f64>()).collect();
        let velocity = (0..dimensions).map(|_| rng.random_range(-v_max..=v_max)).collect();
        Self {
            best_position: position.clone(),
            position,
            velocity,
            best_fitness: f64::INFINITY,
        }
    }

    /// One velocity/position update. `uniform` supplies the `r1`, `r2` draws
    /// (in that order, per coordinate).
    pub fn advance_with(
        &mut self,
        gbest: &[f64],
        coeffs: Coefficients,
        v_max: f64,
        mut uniform: impl FnMut() -> f64,
    ) -> Result<()> {
        let d = self.position.len();
        for len in [self.velocity.len(), self.best_position.len(), gbest.len()] {
            if len != d {
                return Err(Error::LengthMismatch { expected: d, actual: len });
            }
        }
        #[allow(clippy::needless_range_loop)]
        for j in 0..d {
            let (r1, r2) = (uniform(), uniform());
            let x = self.position[j];
            let v = coeffs.w * self.velocity[j]
                + coeffs.c1 * r1 * (self.best_position[j] - x)
                + coeffs.c2 * r2 * (gbest[j] - x);
            let v = v.clamp(-v_max, v_max);
            self.velocity[j] = v;
            // velocity is kept even when the position hits a wall
            self.position[j] = (x + v).clamp(0.0, 1.0);
        }
        Ok(())
    }

    pub fn advance<R: Rng + ?Sized>(
        &mut self,
        gbest: &[f64],
        coeffs: Coefficients,
        v_max: f64,
        rng: &mut R,
    ) -> Result<()> {
        self.advance_with(gbest, coeffs, v_max, || rng.random::<f64>())
    }
}

/// Moves every particle once. Particle `i` draws from its own stream for
/// `iteration`, so the result does not depend on scheduling.
pub fn step(
    swarm: &mut [ParticleState],
    gbest: &[f64],
    coeffs: Coefficients,
    v_max: f64,
    seed: u64,
    iteration: usize,
) -> Result<()> {
    swarm.par_iter_mut().enumerate().try_for_each(|(i, particle)| {
        let mut rng = stream_rng(seed, Purpose::SwarmStep, iteration as u64, i as u64);
        particle.advance(gbest, coeffs, v_max, &mut rng)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub gbest_fitness: f64,
    pub mean_fitness: f64,
    pub coefficients: Coefficients,
}

impl IterationRecord {
    pub fn progress_line(&self) -> String {
        format!(
            "iter={} gbest={} mean={} c1={} c2={} w={}",
            self.iteration,
            self.gbest_fitness,
            self.mean_fitness,
            self.coefficients.c1,
            self.coefficients.c2,
            self.coefficients.w
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub history: Vec<IterationRecord>,
}

impl SwarmResult {
    /// `iteration,gbest_fitness,mean_fitness` at full precision.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,gbest_fitness,mean_fitness\n");
        for r in &self.history {
            out.push_str(&format!("{},{},{}\n", r.iteration, r.gbest_fitness, r.mean_fitness));
        }
        out
    }
}

pub fn optimize<F>(fitness: F, config: &SwarmConfig) -> Result<SwarmResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    optimize_with(fitness, config, |_| {})
}

/// Runs the swarm, calling `observer` after each iteration's bests settle.
pub fn optimize_with<F, O>(fitness: F, config: &SwarmConfig, mut observer: O) -> Result<SwarmResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
    O: FnMut(&IterationRecord),
{
    config.validate()?;
    let mut swarm: Vec<ParticleState> = (0..config.n_particles)
        .map(|i| {
            let mut rng = stream_rng(config.seed, Purpose::SwarmInit, 0, i as u64);
            ParticleState::random(config.dimensions, config.v_max, &mut rng)
        })
        .collect();

    let mut gbest: Option<(Vec<f64>, f64)> = None;
    let mut history = Vec::with_capacity(config.iterations);

    for iteration in 0..config.iterations {
        let coefficients = config.coefficients(iteration);
        let scores: Vec<f64> = swarm
            .par_iter()
            .enumerate()
            .map(|(particle, p)| {
                let wrap = |source| Error::Fitness { particle, iteration, source: Box::new(source) };
                match fitness(&p.position) {
                    Ok(f) if f.is_nan() => Err(wrap(Error::Invariant("fitness is NaN".into()))),
                    Ok(f) => Ok(f),
                    Err(e) => Err(wrap(e)),
                }
            })
            .collect::<Result<_>>()?;

        for (p, &score) in swarm.iter_mut().zip(&scores) {
            if score < p.best_fitness {
                p.best_fitness = score;
                p.best_position.clone_from(&p.position);
            }
            if gbest.as_ref().is_none_or(|(_, best)| score < *best) {
                gbest = Some((p.position.clone(), score));
            }
        }
        let (gbest_position, gbest_fitness) =
            gbest.as_ref().expect("a swarm has at least one particle");

        let record = IterationRecord {
            iteration,
            gbest_fitness: *gbest_fitness,
            mean_fitness: scores.iter().sum::<f64>() / scores.len() as f64,
            coefficients,
        };
        observer(&record);
        history.push(record);

        if iteration + 1 < config.iterations {
            let gbest_position = gbest_position.clone();
            step(&mut swarm, &gbest_position, coefficients, config.v_max, config.seed, iteration)?;
        }
    }

    let (best_position, best_fitness) = gbest.expect("at least one iteration ran");
    Ok(SwarmResult { best_position, best_fitness, history })
}
