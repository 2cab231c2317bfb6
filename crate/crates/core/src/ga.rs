//! Genetic algorithm over the permutation + break-point chromosome.
//!
//! Each generation copies the parent population into an offspring pool,
//! recombines consecutive pairs with probability `crossover_rate`, mutates
//! every gene with probability `mutation_rate`, then draws the next parent
//! population by roulette over parents and offspring combined. The best
//! chromosome seen so far always survives. The run stops once the best
//! fitness has not improved for `stagnation_limit` generations.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Encoding, Instance, Solution};
use crate::rng::{self, SolverRng};
use crate::solver::SolveResult;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    /// `None` means `4 (n + |K| - 1)`.
    pub population_size: Option<usize>,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub stagnation_limit: usize,
    pub max_generations: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: None,
            crossover_rate: 0.6,
            mutation_rate: 0.05,
            stagnation_limit: 500,
            max_generations: 10_000,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn resolved_population(&self, instance: &Instance) -> usize {
        self.population_size
            .unwrap_or_else(|| 4 * (instance.n_targets() + instance.n_uavs() - 1))
            .max(2)
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!(
                    "ga.{name} must be in [0, 1], got {p}"
                )))
            }
        };
        prob("crossover_rate", self.crossover_rate)?;
        prob("mutation_rate", self.mutation_rate)?;
        if self.population_size == Some(0) {
            return Err(Error::InvalidConfig(
                "ga.population_size must be positive".into(),
            ));
        }
        if self.stagnation_limit == 0 || self.max_generations == 0 {
            return Err(Error::InvalidConfig(
                "ga.stagnation_limit and ga.max_generations must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn fitness(instance: &Instance, encoding: &Encoding) -> Result<f64> {
    encoding.validate(instance.n_targets(), instance.n_uavs())?;
    Ok(instance.encoding_reward(encoding))
}

/// Indices drawn with replacement, proportional to fitness; uniform when the
/// fitnesses sum to zero.
fn roulette_indices<R: Rng + ?Sized>(fitnesses: &[f64], count: usize, rng: &mut R) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(fitnesses.len());
    let mut total = 0.0;
    for f in fitnesses {
        total += f.max(0.0);
        cumulative.push(total);
    }
    let len = fitnesses.len();
    (0..count)
        .map(|_| {
            if total > 0.0 {
                let x = rng::unit_f64(rng) * total;
                cumulative.partition_point(|c| *c <= x).min(len - 1)
            } else {
                rng.random_range(0..len)
            }
        })
        .collect()
}

pub fn select_roulette<R: Rng + ?Sized>(
    population: &[Encoding],
    fitnesses: &[f64],
    count: usize,
    rng: &mut R,
) -> Result<Vec<Encoding>> {
    if population.is_empty() {
        return Err(Error::InvalidArgument(
            "roulette over an empty population".into(),
        ));
    }
    if population.len() != fitnesses.len() {
        return Err(Error::InvalidArgument(format!(
            "{} individuals but {} fitness values",
            population.len(),
            fitnesses.len()
        )));
    }
    Ok(roulette_indices(fitnesses, count, rng)
        .into_iter()
        .map(|i| population[i].clone())
        .collect())
}

/// Order crossover on `first` keeping `donor`'s relative order outside the
/// cut segment `[lo, hi]`.
fn order_crossover(first: &[usize], donor: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let n = first.len();
    let mut child = vec![0; n];
    let mut used = vec![false; n + 1];
    for i in lo..=hi {
        child[i] = first[i];
        used[first[i]] = true;
    }
    let mut slot = (hi + 1) % n;
    for step in 0..n {
        let gene = donor[(hi + 1 + step) % n];
        if !used[gene] {
            child[slot] = gene;
            slot = (slot + 1) % n;
        }
    }
    child
}

pub fn crossover<R: Rng + ?Sized>(
    a: &Encoding,
    b: &Encoding,
    rng: &mut R,
) -> Result<(Encoding, Encoding)> {
    if a.perm.len() != b.perm.len() || a.breaks.len() != b.breaks.len() {
        return Err(Error::InvalidArgument(format!(
            "parents disagree on shape: n {} vs {}, breaks {} vs {}",
            a.perm.len(),
            b.perm.len(),
            a.breaks.len(),
            b.breaks.len()
        )));
    }
    let n = a.perm.len();
    let (perm_a, perm_b) = if n < 2 {
        (a.perm.clone(), b.perm.clone())
    } else {
        let x = rng.random_range(0..n);
        let y = rng.random_range(0..n);
        let (lo, hi) = (x.min(y), x.max(y));
        (
            order_crossover(&a.perm, &b.perm, lo, hi),
            order_crossover(&b.perm, &a.perm, lo, hi),
        )
    };

    let mut breaks_a = a.breaks.clone();
    let mut breaks_b = b.breaks.clone();
    for (x, y) in breaks_a.iter_mut().zip(breaks_b.iter_mut()) {
        if rng.random_bool(0.5) {
            std::mem::swap(x, y);
        }
    }
    for breaks in [&mut breaks_a, &mut breaks_b] {
        breaks.iter_mut().for_each(|v| *v = (*v).min(n));
        breaks.sort_unstable();
    }
    Ok((
        Encoding::new(perm_a, breaks_a),
        Encoding::new(perm_b, breaks_b),
    ))
}

pub fn mutate<R: Rng + ?Sized>(e: &Encoding, mutation_rate: f64, rng: &mut R) -> Encoding {
    let mut out = e.clone();
    mutate_in_place(&mut out, mutation_rate, rng);
    out
}

fn mutate_in_place<R: Rng + ?Sized>(e: &mut Encoding, mutation_rate: f64, rng: &mut R) {
    if mutation_rate <= 0.0 {
        return;
    }
    let n = e.perm.len();
    if n >= 2 {
        for i in 0..n {
            if rng.random_bool(mutation_rate) {
                // another position, uniformly
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                e.perm.swap(i, j);
            }
        }
    }
    let mut changed = false;
    for b in e.breaks.iter_mut() {
        if rng.random_bool(mutation_rate) {
            *b = rng.random_range(0..=n);
            changed = true;
        }
    }
    if changed {
        e.breaks.sort_unstable();
    }
}

pub fn solve_ga(instance: &Instance, config: &GaConfig) -> Result<SolveResult> {
    config.validate()?;
    let start = Instant::now();
    let mut rng: SolverRng = rng::seeded(config.seed);
    let n = instance.n_targets();
    let k = instance.n_uavs();
    let size = config.resolved_population(instance);

    let mut parents: Vec<Encoding> = (0..size)
        .map(|_| Encoding::random(n, k, &mut rng))
        .collect();
    let mut parent_fit: Vec<f64> = parents
        .iter()
        .map(|e| instance.encoding_reward(e))
        .collect();

    let (mut best_idx, mut best_fit) = (0, parent_fit[0]);
    for (i, f) in parent_fit.iter().enumerate() {
        if *f > best_fit {
            best_idx = i;
            best_fit = *f;
        }
    }
    let mut best = parents[best_idx].clone();

    let mut history = Vec::new();
    let mut stagnant = 0;
    let mut generations = 0u64;
    while (generations as usize) < config.max_generations && stagnant < config.stagnation_limit {
        let mut offspring = parents.clone();
        for pair in offspring.chunks_exact_mut(2) {
            if rng.random_bool(config.crossover_rate) {
                let (x, y) = crossover(&pair[0], &pair[1], &mut rng)?;
                pair[0] = x;
                pair[1] = y;
            }
        }
        for child in offspring.iter_mut() {
            mutate_in_place(child, config.mutation_rate, &mut rng);
        }
        let offspring_fit: Vec<f64> = offspring
            .iter()
            .map(|e| instance.encoding_reward(e))
            .collect();

        let mut improved = false;
        for (e, f) in offspring.iter().zip(&offspring_fit) {
            if *f > best_fit {
                best_fit = *f;
                best = e.clone();
                improved = true;
            }
        }
        stagnant = if improved { 0 } else { stagnant + 1 };

        let pool: Vec<Encoding> = parents.into_iter().chain(offspring).collect();
        let pool_fit: Vec<f64> = parent_fit.into_iter().chain(offspring_fit).collect();
        let picked = roulette_indices(&pool_fit, size, &mut rng);
        parents = picked.iter().map(|&i| pool[i].clone()).collect();
        parent_fit = picked.iter().map(|&i| pool_fit[i]).collect();
        // elitism
        let slot = index::sample(&mut rng, size, 1).index(0);
        parents[slot] = best.clone();
        parent_fit[slot] = best_fit;

        history.push(best_fit);
        generations += 1;
    }

    let decoded = instance.decode(&best)?;
    let evaluation = instance.evaluate(&decoded)?;
    let best_solution: Solution = decoded.collected_prefix(&evaluation);
    debug_assert_eq!(evaluation.total_reward.to_bits(), best_fit.to_bits());
    Ok(SolveResult {
        best_solution,
        best_reward: evaluation.total_reward,
        wall_time: start.elapsed().as_secs_f64(),
        iterations_run: generations,
        reward_history: history,
        proven_optimal: false,
    })
}
