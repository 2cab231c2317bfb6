//! Ant colony optimization with one pheromone type per UAV.
//!
//! Every iteration sends out `m_groups` groups of `|K|` ants; ant `k` of a
//! group flies for UAV `k`. The ants of one group share an unvisited list, so
//! a group builds one joint solution. The next target is drawn by roulette
//! over deadline-feasible candidates with weight `tau^alpha * H^beta`, where
//! `H = s_k * r_j / (d_ij * t_j)`.
//!
//! After an iteration each type `k` gets a volatilization factor
//!
//! ```text
//! V(k) = sum over groups g of r_ant(g, k) / (1 + (r_max - r_group(g))^eta) / m
//! ```
//!
//! which is scaled into an evaporation rate in `[0, RHO_MAX]` relative to the
//! largest factor of the iteration. Each ant then deposits
//! `deposit_scale * r_ant` on the arcs it flew.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{Instance, Solution};
use crate::rng::{self, derive_seed, SolverRng};
use crate::solver::SolveResult;
use crate::{Error, Result};

pub const PHEROMONE_FLOOR: f64 = 1e-6;
pub const RHO_MAX: f64 = 0.5;
const ZERO_GUARD: f64 = 1e-9;
const V_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcoConfig {
    pub m_groups: usize,
    pub iterations: usize,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub initial_pheromone: f64,
    /// `None` means `1 / (m_groups * upper_bound_reward(instance))`.
    pub deposit_scale: Option<f64>,
    /// Build the groups of one iteration on the rayon pool. Results do not
    /// depend on this flag.
    pub parallel: bool,
    pub seed: u64,
}

impl Default for AcoConfig {
    fn default() -> Self {
        Self {
            m_groups: 20,
            iterations: 100,
            alpha: 1.0,
            beta: 1.0,
            eta: 2.0,
            initial_pheromone: 1.0,
            deposit_scale: None,
            parallel: false,
            seed: 0,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_groups == 0 || self.iterations == 0 {
            return Err(Error::InvalidConfig(
                "aco.m_groups and aco.iterations must be positive".into(),
            ));
        }
        let checks = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("eta", self.eta),
            ("initial_pheromone", self.initial_pheromone),
            ("deposit_scale", self.deposit_scale.unwrap_or(1.0)),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "aco.{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn resolved_deposit_scale(&self, instance: &Instance) -> f64 {
        self.deposit_scale.unwrap_or_else(|| {
            let ub = instance.upper_bound_reward();
            if ub > 0.0 {
                1.0 / (self.m_groups as f64 * ub)
            } else {
                1.0
            }
        })
    }
}

/// One `(n+1) x (n+1)` trail matrix per UAV type.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneState {
    size: usize,
    trails: Vec<Vec<f64>>,
}

impl PheromoneState {
    pub fn new(instance: &Instance, initial: f64) -> Self {
        let size = instance.n_targets() + 1;
        Self {
            size,
            trails: vec![vec![initial.max(PHEROMONE_FLOOR); size * size]; instance.n_uavs()],
        }
    }

    pub fn n_types(&self) -> usize {
        self.trails.len()
    }

    pub fn get(&self, uav: usize, from: usize, to: usize) -> f64 {
        self.trails[uav][from * self.size + to]
    }

    pub fn matrix(&self, uav: usize) -> &[f64] {
        &self.trails[uav]
    }
}

/// `s_k * r_to / (d(from, to) * t_to)`, with zero distances or service times
/// replaced by a tiny constant.
pub fn heuristic(instance: &Instance, uav: usize, from: usize, to: usize) -> Result<f64> {
    if from == to {
        return Err(Error::InvalidArgument(format!(
            "heuristic from a vertex to itself ({from})"
        )));
    }
    let target = instance
        .target(to)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown target {to}")))?;
    let speed = *instance
        .speeds()
        .get(uav)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown UAV {uav}")))?;
    let d = instance.distance(from, to)?;
    Ok(heuristic_value(
        speed,
        target.reward,
        d,
        target.service_time,
    ))
}

#[inline]
fn heuristic_value(speed: f64, reward: f64, distance: f64, service: f64) -> f64 {
    let d = if distance == 0.0 {
        ZERO_GUARD
    } else {
        distance
    };
    let t = if service == 0.0 { ZERO_GUARD } else { service };
    speed * reward / (d * t)
}

/// Roulette choice of the next target for ant `uav` standing at `current`
/// at time `elapsed`. `unvisited[j - 1]` flags target `j`. Returns `None`
/// when no unvisited target can be completed before the deadline.
#[allow(clippy::too_many_arguments)]
pub fn next_target<R: Rng + ?Sized>(
    instance: &Instance,
    state: &PheromoneState,
    uav: usize,
    current: usize,
    elapsed: f64,
    unvisited: &[bool],
    config: &AcoConfig,
    rng: &mut R,
) -> Option<usize> {
    let speed = instance.speeds()[uav];
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    let mut total = 0.0;
    for (idx, target) in instance.targets().iter().enumerate() {
        let j = idx + 1;
        if !unvisited[idx] || j == current {
            continue;
        }
        if instance.completion_time(uav, current, elapsed, j) > instance.t_max() {
            continue;
        }
        let h = heuristic_value(
            speed,
            target.reward,
            instance.dist(current, j),
            target.service_time,
        );
        let w = state.get(uav, current, j).powf(config.alpha) * h.powf(config.beta);
        total += w;
        candidates.push((j, total));
    }
    match candidates.len() {
        0 => None,
        1 => Some(candidates[0].0),
        len => {
            if total.is_finite() && total > 0.0 {
                let x = rng::unit_f64(rng) * total;
                let i = candidates.partition_point(|(_, c)| *c <= x).min(len - 1);
                Some(candidates[i].0)
            } else {
                Some(candidates[rng.random_range(0..len)].0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupResult {
    pub solution: Solution,
    pub r_group: f64,
    pub r_ant: Vec<f64>,
}

pub fn construct_group<R: Rng + ?Sized>(
    instance: &Instance,
    state: &PheromoneState,
    config: &AcoConfig,
    rng: &mut R,
) -> GroupResult {
    let mut unvisited = vec![true; instance.n_targets()];
    let mut routes = Vec::with_capacity(instance.n_uavs());
    let mut r_ant = Vec::with_capacity(instance.n_uavs());
    for uav in 0..instance.n_uavs() {
        let mut route = Vec::new();
        let mut at = 0;
        let mut time = 0.0;
        let mut reward = 0.0;
        while let Some(j) = next_target(instance, state, uav, at, time, &unvisited, config, rng) {
            time = instance.completion_time(uav, at, time, j);
            at = j;
            unvisited[j - 1] = false;
            reward += instance.targets()[j - 1].reward;
            route.push(j);
        }
        routes.push(route);
        r_ant.push(reward);
    }
    let collected: Vec<bool> = unvisited.iter().map(|u| !u).collect();
    GroupResult {
        solution: Solution::new(routes),
        r_group: instance.sum_collected(&collected),
        r_ant,
    }
}

/// `V(k)` for every type over one iteration's groups.
pub fn volatilization_factors(groups: &[GroupResult], n_types: usize, eta: f64) -> Vec<f64> {
    let m = groups.len() as f64;
    let r_max = groups
        .iter()
        .map(|g| g.r_group)
        .fold(f64::NEG_INFINITY, f64::max);
    (0..n_types)
        .map(|k| {
            groups
                .iter()
                .map(|g| g.r_ant[k] / (1.0 + (r_max - g.r_group).powf(eta)))
                .sum::<f64>()
                / m
        })
        .collect()
}

/// Evaporation rates `rho_k = V(k) / (max V + eps) * RHO_MAX`.
pub fn evaporation_rates(factors: &[f64]) -> Vec<f64> {
    let max_v = factors.iter().copied().fold(0.0, f64::max);
    factors
        .iter()
        .map(|v| v / (max_v + V_EPSILON) * RHO_MAX)
        .collect()
}

pub fn volatilize_and_deposit(
    state: &mut PheromoneState,
    groups: &[GroupResult],
    eta: f64,
    deposit_scale: f64,
) {
    if groups.is_empty() {
        return;
    }
    let rho = evaporation_rates(&volatilization_factors(groups, state.n_types(), eta));
    let size = state.size;
    for (k, trail) in state.trails.iter_mut().enumerate() {
        let keep = 1.0 - rho[k];
        trail.iter_mut().for_each(|t| *t *= keep);
        for g in groups {
            let amount = deposit_scale * g.r_ant[k];
            if amount <= 0.0 {
                continue;
            }
            let mut at = 0;
            for &j in &g.solution.routes[k] {
                trail[at * size + j] += amount;
                at = j;
            }
        }
        trail.iter_mut().for_each(|t| *t = t.max(PHEROMONE_FLOOR));
    }
}

pub fn solve_aco(instance: &Instance, config: &AcoConfig) -> Result<SolveResult> {
    config.validate()?;
    let start = Instant::now();
    let deposit_scale = config.resolved_deposit_scale(instance);
    let mut state = PheromoneState::new(instance, config.initial_pheromone);

    let mut best = Solution::empty(instance.n_uavs());
    let mut best_reward = 0.0;
    let mut history = Vec::with_capacity(config.iterations);

    for iter in 0..config.iterations {
        let build = |g: usize| {
            let mut rng: SolverRng =
                rng::seeded(derive_seed(config.seed, &[iter as u64, g as u64]));
            construct_group(instance, &state, config, &mut rng)
        };
        let groups: Vec<GroupResult> = if config.parallel {
            (0..config.m_groups).into_par_iter().map(build).collect()
        } else {
            (0..config.m_groups).map(build).collect()
        };
        for g in &groups {
            if g.r_group > best_reward {
                best_reward = g.r_group;
                best = g.solution.clone();
            }
        }
        volatilize_and_deposit(&mut state, &groups, config.eta, deposit_scale);
        history.push(best_reward);
    }

    let evaluation = instance.evaluate(&best)?;
    debug_assert!(evaluation.is_feasible());
    Ok(SolveResult {
        best_solution: best,
        best_reward: evaluation.total_reward,
        wall_time: start.elapsed().as_secs_f64(),
        iterations_run: config.iterations as u64,
        reward_history: history,
        proven_optimal: false,
    })
}
