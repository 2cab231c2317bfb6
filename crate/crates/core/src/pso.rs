//! Particle swarm optimization with random-key decoding.
//!
//! A particle position has `n + |K| - 1` real components. The first `n` are
//! keys whose ascending rank order gives the target permutation; the last
//! `|K| - 1` are break points, clamped to `[0, n]` and rounded. Velocities
//! are steered by the personal best and by the best personal best of a ring
//! neighborhood (local PSO); after `global_phase_start` of the run the
//! swarm-wide best is used instead.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{Encoding, Instance};
use crate::rng::{self, SolverRng};
use crate::solver::SolveResult;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    /// `None` means `2 (n + |K| - 1)`.
    pub particle_count: Option<usize>,
    /// `None` means `40 (n + |K| - 1)`.
    pub iterations: Option<usize>,
    pub mutation_prob: f64,
    pub mutated_particle_fraction: f64,
    pub mutated_position_fraction: f64,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub neighborhood_size: usize,
    /// Uniform velocity cap. `None` caps each component at a quarter of its
    /// initialization range (0.25 for keys, 0.25 n for break points).
    pub v_max: Option<f64>,
    /// Fraction of the run after which the neighborhood guide is replaced
    /// by the global best. `None` keeps the local topology throughout.
    pub global_phase_start: Option<f64>,
    /// Evaluate particles on the rayon pool. Results do not depend on it.
    pub parallel: bool,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            particle_count: None,
            iterations: None,
            mutation_prob: 0.4,
            mutated_particle_fraction: 0.5,
            mutated_position_fraction: 0.5,
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            neighborhood_size: 5,
            v_max: None,
            global_phase_start: Some(0.5),
            parallel: false,
            seed: 0,
        }
    }
}

pub fn dimension(instance: &Instance) -> usize {
    instance.n_targets() + instance.n_uavs() - 1
}

impl PsoConfig {
    pub fn resolved_particle_count(&self, instance: &Instance) -> usize {
        self.particle_count
            .unwrap_or(2 * dimension(instance))
            .max(1)
    }

    pub fn resolved_iterations(&self, instance: &Instance) -> usize {
        self.iterations.unwrap_or(40 * dimension(instance)).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("mutation_prob", self.mutation_prob),
            ("mutated_particle_fraction", self.mutated_particle_fraction),
            ("mutated_position_fraction", self.mutated_position_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "pso.{name} must be in [0, 1], got {p}"
                )));
            }
        }
        for (name, c) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
        ] {
            if !c.is_finite() {
                return Err(Error::InvalidConfig(format!("pso.{name} must be finite")));
            }
        }
        if self.neighborhood_size == 0
            || self.particle_count == Some(0)
            || self.iterations == Some(0)
        {
            return Err(Error::InvalidConfig(
                "pso.neighborhood_size, particle_count and iterations must be positive".into(),
            ));
        }
        if let Some(v) = self.v_max {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "pso.v_max must be positive, got {v}"
                )));
            }
        }
        if let Some(f) = self.global_phase_start {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidConfig(format!(
                    "pso.global_phase_start must be in [0, 1], got {f}"
                )));
            }
        }
        Ok(())
    }
}

pub fn decode_particle(instance: &Instance, position: &[f64]) -> Result<Encoding> {
    let n = instance.n_targets();
    let dim = dimension(instance);
    if position.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "particle has dimension {}, expected {dim}",
            position.len()
        )));
    }
    Ok(decode_keys(&position[..n], &position[n..]))
}

fn decode_keys(keys: &[f64], break_keys: &[f64]) -> Encoding {
    let n = keys.len();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort: equal keys keep index order
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let perm = order.into_iter().map(|i| i + 1).collect();
    let mut breaks: Vec<usize> = break_keys
        .iter()
        .map(|b| b.clamp(0.0, n as f64).round() as usize)
        .collect();
    breaks.sort_unstable();
    Encoding::new(perm, breaks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_reward: f64,
}

/// Applies one velocity/position update with given uniform draws.
pub fn step_particle(
    particle: &mut Particle,
    guide: &[f64],
    config: &PsoConfig,
    v_max: &[f64],
    u1: &[f64],
    u2: &[f64],
) {
    for d in 0..particle.position.len() {
        let x = particle.position[d];
        let v = config.inertia * particle.velocity[d]
            + config.cognitive * u1[d] * (particle.best_position[d] - x)
            + config.social * u2[d] * (guide[d] - x);
        let v = v.clamp(-v_max[d], v_max[d]);
        particle.velocity[d] = v;
        particle.position[d] = x + v;
    }
}

/// `guides[i]` is the social attractor of particle `i`.
pub fn step_velocity_position<R: Rng + ?Sized>(
    particles: &mut [Particle],
    guides: &[Vec<f64>],
    config: &PsoConfig,
    v_max: &[f64],
    rng: &mut R,
) {
    let dim = v_max.len();
    let mut u1 = vec![0.0; dim];
    let mut u2 = vec![0.0; dim];
    for (p, guide) in particles.iter_mut().zip(guides) {
        u1.iter_mut().for_each(|u| *u = rng::unit_f64(rng));
        u2.iter_mut().for_each(|u| *u = rng::unit_f64(rng));
        step_particle(p, guide, config, v_max, &u1, &u2);
    }
}

/// With probability `mutation_prob`, redraws `ceil(position_fraction * dim)`
/// components in each of `ceil(particle_fraction * PN)` particles. Returns
/// whether a mutation happened.
pub fn mutate_swarm<R: Rng + ?Sized>(
    particles: &mut [Particle],
    config: &PsoConfig,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> bool {
    if particles.is_empty() || bounds.is_empty() || !rng.random_bool(config.mutation_prob) {
        return false;
    }
    let pn = particles.len();
    let dim = bounds.len();
    let picked = ((config.mutated_particle_fraction * pn as f64).ceil() as usize).min(pn);
    let comps = ((config.mutated_position_fraction * dim as f64).ceil() as usize).min(dim);
    for p in index::sample(rng, pn, picked).into_vec() {
        for d in index::sample(rng, dim, comps).into_vec() {
            let (lo, hi) = bounds[d];
            particles[p].position[d] = rng::uniform(rng, lo, hi);
        }
    }
    true
}

/// Swarm state between iterations.
#[derive(Debug, Clone)]
pub struct Swarm {
    particles: Vec<Particle>,
    bounds: Vec<(f64, f64)>,
    v_max: Vec<f64>,
    n_targets: usize,
    global_best_position: Vec<f64>,
    global_best_reward: f64,
}

impl Swarm {
    pub fn new<R: Rng + ?Sized>(instance: &Instance, config: &PsoConfig, rng: &mut R) -> Self {
        let n = instance.n_targets();
        let dim = dimension(instance);
        let bounds: Vec<(f64, f64)> = (0..dim)
            .map(|d| if d < n { (0.0, 1.0) } else { (0.0, n as f64) })
            .collect();
        let v_max: Vec<f64> = bounds
            .iter()
            .map(|(lo, hi)| config.v_max.unwrap_or(0.25 * (hi - lo)))
            .collect();
        let particles = (0..config.resolved_particle_count(instance))
            .map(|_| {
                let position: Vec<f64> = bounds
                    .iter()
                    .map(|&(lo, hi)| rng::uniform(rng, lo, hi))
                    .collect();
                let velocity = v_max.iter().map(|&v| rng::uniform(rng, -v, v)).collect();
                Particle {
                    best_position: position.clone(),
                    position,
                    velocity,
                    best_reward: f64::NEG_INFINITY,
                }
            })
            .collect();
        Self {
            particles,
            bounds,
            v_max,
            n_targets: n,
            global_best_position: vec![0.0; dim],
            global_best_reward: f64::NEG_INFINITY,
        }
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn global_best_reward(&self) -> f64 {
        self.global_best_reward
    }

    pub fn global_best_position(&self) -> &[f64] {
        &self.global_best_position
    }

    pub fn mutate<R: Rng + ?Sized>(&mut self, config: &PsoConfig, rng: &mut R) -> bool {
        mutate_swarm(&mut self.particles, config, &self.bounds, rng)
    }

    fn decode(&self, position: &[f64]) -> Encoding {
        decode_keys(&position[..self.n_targets], &position[self.n_targets..])
    }

    /// Scores every particle and updates personal and global bests.
    pub fn evaluate(&mut self, instance: &Instance, parallel: bool) {
        let score = |p: &Particle| instance.encoding_reward(&self.decode(&p.position));
        let rewards: Vec<f64> = if parallel {
            self.particles.par_iter().map(score).collect()
        } else {
            self.particles.iter().map(score).collect()
        };
        for (p, reward) in self.particles.iter_mut().zip(rewards) {
            if reward > p.best_reward {
                p.best_reward = reward;
                p.best_position.clone_from(&p.position);
                if reward > self.global_best_reward {
                    self.global_best_reward = reward;
                    self.global_best_position.clone_from(&p.position);
                }
            }
        }
    }

    /// Index of the best personal best within the ring window of `i`.
    pub fn neighborhood_best(&self, i: usize, size: usize) -> usize {
        let pn = self.particles.len();
        if size >= pn {
            return self.best_particle();
        }
        let half = size / 2;
        let mut best = i;
        for off in 0..size {
            let j = (i + pn - half + off) % pn;
            if self.particles[j].best_reward > self.particles[best].best_reward {
                best = j;
            }
        }
        best
    }

    fn best_particle(&self) -> usize {
        let mut best = 0;
        for (j, p) in self.particles.iter().enumerate() {
            if p.best_reward > self.particles[best].best_reward {
                best = j;
            }
        }
        best
    }

    pub fn step<R: Rng + ?Sized>(&mut self, config: &PsoConfig, global_phase: bool, rng: &mut R) {
        let guides: Vec<Vec<f64>> = if global_phase {
            vec![self.global_best_position.clone(); self.particles.len()]
        } else {
            (0..self.particles.len())
                .map(|i| {
                    let j = self.neighborhood_best(i, config.neighborhood_size);
                    self.particles[j].best_position.clone()
                })
                .collect()
        };
        step_velocity_position(&mut self.particles, &guides, config, &self.v_max, rng);
    }

    pub fn best_encoding(&self) -> Encoding {
        self.decode(&self.global_best_position)
    }
}

pub fn solve_pso(instance: &Instance, config: &PsoConfig) -> Result<SolveResult> {
    config.validate()?;
    let start = Instant::now();
    let mut rng: SolverRng = rng::seeded(config.seed);
    let iterations = config.resolved_iterations(instance);
    let switch_at = config
        .global_phase_start
        .map(|f| (f * iterations as f64).ceil() as usize);

    let mut swarm = Swarm::new(instance, config, &mut rng);
    let mut history = Vec::with_capacity(iterations);
    for it in 0..iterations {
        swarm.mutate(config, &mut rng);
        swarm.evaluate(instance, config.parallel);
        history.push(swarm.global_best_reward());
        let global_phase = switch_at.is_some_and(|s| it >= s);
        swarm.step(config, global_phase, &mut rng);
    }

    let decoded = instance.decode(&swarm.best_encoding())?;
    let evaluation = instance.evaluate(&decoded)?;
    debug_assert_eq!(
        evaluation.total_reward.to_bits(),
        swarm.global_best_reward().to_bits()
    );
    Ok(SolveResult {
        best_solution: decoded.collected_prefix(&evaluation),
        best_reward: evaluation.total_reward,
        wall_time: start.elapsed().as_secs_f64(),
        iterations_run: iterations as u64,
        reward_history: history,
        proven_optimal: false,
    })
}
