//! Repeated-run experiment protocol.
//!
//! A plan is a grid of cells `(scale, instance, algorithm, run)`. Every
//! instance and every run gets its own seed derived from the master seed, so
//! the reward fields of a report are reproducible regardless of execution
//! order or worker count. Wall times are measured around the solve call
//! only and depend on the machine.

mod report;

use std::panic::{self, AssertUnwindSafe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gen::{generate, GenParams, Scale};
use crate::model::{Instance, InstanceMeta, Solution};
use crate::rng::derive_seed;
use crate::solver::{Algorithm, SolverConfigs};
use crate::{Error, Result};

pub use report::{
    cells_csv, compare_table, gnuplot_columns, parse_cells_csv, parse_summary_csv, reward_table,
    summary_csv, time_ordering, CsvCell,
};

const SEED_DOMAIN_INSTANCE: u64 = 0;
const SEED_DOMAIN_RUN: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleEntry {
    pub label: String,
    pub params: GenParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs_per_instance: Option<usize>,
}

impl ScaleEntry {
    pub fn preset(scale: Scale) -> Self {
        Self {
            label: scale.name().to_string(),
            params: scale.params(),
            instances: None,
            runs_per_instance: None,
        }
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs_per_instance = Some(runs);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchPlan {
    pub scales: Vec<ScaleEntry>,
    pub instances_per_scale: usize,
    pub runs_per_instance: usize,
    pub algorithms: Vec<Algorithm>,
    pub master_seed: u64,
    pub configs: SolverConfigs,
    /// Worker threads for independent cells; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// Run cells one after another so timings do not contend.
    pub sequential_timing: bool,
}

impl Default for BenchPlan {
    fn default() -> Self {
        Self::desk(0)
    }
}

impl BenchPlan {
    /// All three scales with 10 instances; 10 runs each at small scale and
    /// 3 at medium and large.
    pub fn desk(master_seed: u64) -> Self {
        Self {
            scales: vec![
                ScaleEntry::preset(Scale::Small),
                ScaleEntry::preset(Scale::Medium).with_runs(3),
                ScaleEntry::preset(Scale::Large).with_runs(3),
            ],
            instances_per_scale: 10,
            runs_per_instance: 10,
            algorithms: vec![Algorithm::Ga, Algorithm::Aco, Algorithm::Pso],
            master_seed,
            configs: SolverConfigs::default(),
            workers: None,
            sequential_timing: false,
        }
    }

    /// 10 instances x 10 runs on every scale.
    pub fn full(master_seed: u64) -> Self {
        Self {
            scales: Scale::ALL.into_iter().map(ScaleEntry::preset).collect(),
            ..Self::desk(master_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() || self.algorithms.is_empty() {
            return Err(Error::InvalidArgument(
                "plan needs at least one scale and one algorithm".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument("workers must be positive".into()));
        }
        for s in &self.scales {
            s.params.validate()?;
        }
        self.configs.ga.validate()?;
        self.configs.aco.validate()?;
        self.configs.pso.validate()?;
        Ok(())
    }

    fn instances_for(&self, scale: &ScaleEntry) -> usize {
        scale.instances.unwrap_or(self.instances_per_scale)
    }

    fn runs_for(&self, scale: &ScaleEntry) -> usize {
        scale.runs_per_instance.unwrap_or(self.runs_per_instance)
    }

    pub fn instance_seed(&self, scale_index: usize, instance_index: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[
                SEED_DOMAIN_INSTANCE,
                scale_index as u64,
                instance_index as u64,
            ],
        )
    }

    pub fn run_seed(
        &self,
        scale_index: usize,
        instance_index: usize,
        algorithm: Algorithm,
        run: usize,
    ) -> u64 {
        derive_seed(
            self.master_seed,
            &[
                SEED_DOMAIN_RUN,
                scale_index as u64,
                instance_index as u64,
                algorithm.id(),
                run as u64,
            ],
        )
    }

    /// Every cell in canonical order.
    pub fn cells(&self) -> Vec<CellSpec> {
        let mut out = Vec::new();
        for (si, scale) in self.scales.iter().enumerate() {
            for ii in 0..self.instances_for(scale) {
                for &algorithm in &self.algorithms {
                    for run in 0..self.runs_for(scale) {
                        out.push(CellSpec {
                            scale_index: si,
                            instance_index: ii,
                            algorithm,
                            run,
                            seed: self.run_seed(si, ii, algorithm, run),
                        });
                    }
                }
            }
        }
        out
    }

    /// The instance of `(scale_index, instance_index)`.
    pub fn instance(&self, scale_index: usize, instance_index: usize) -> Result<Instance> {
        let scale = &self.scales[scale_index];
        let seed = self.instance_seed(scale_index, instance_index);
        let params = scale.params.clone().with_seed(seed);
        Ok(generate(&params)?.with_meta(InstanceMeta {
            seed: Some(seed),
            scale: Some(scale.label.clone()),
            params: Some(params),
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSpec {
    pub scale_index: usize,
    pub instance_index: usize,
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub scale: String,
    pub scale_index: usize,
    pub instance_index: usize,
    pub instance_seed: u64,
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub upper_bound: f64,
    pub reward: Option<f64>,
    pub normalized_reward: Option<f64>,
    pub wall_time: Option<f64>,
    pub iterations: Option<u64>,
    pub proven_optimal: bool,
    pub solution: Option<Solution>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scale: String,
    pub algorithm: Algorithm,
    pub cells: usize,
    pub failures: usize,
    pub mean_reward: f64,
    pub stddev_reward: f64,
    pub mean_normalized_reward: f64,
    pub mean_wall_time: f64,
    pub stddev_wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub cpu_model: String,
    pub artifact_version: String,
    pub os: String,
    pub workers: usize,
    pub sequential_timing: bool,
    pub note: String,
}

impl Environment {
    fn detect(workers: usize, sequential_timing: bool) -> Self {
        Self {
            cpu_model: cpu_model(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            workers,
            sequential_timing,
            note: "wall times are environment-dependent; rewards are reproducible from master_seed"
                .into(),
        }
    }
}

fn cpu_model() -> String {
    std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|text| {
            text.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|s| s.trim().to_string())
        })
        .unwrap_or_else(|| "unknown".to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub master_seed: u64,
    pub environment: Environment,
    pub cells: Vec<CellResult>,
    pub summary: Vec<SummaryRow>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation; zero for fewer than two values.
fn stddev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Per-(scale, algorithm) statistics over successful cells, in order of
/// first appearance.
pub fn aggregate(cells: &[CellResult]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, String, Algorithm)> = Vec::new();
    for c in cells {
        if !keys
            .iter()
            .any(|(si, _, a)| *si == c.scale_index && *a == c.algorithm)
        {
            keys.push((c.scale_index, c.scale.clone(), c.algorithm));
        }
    }
    keys.into_iter()
        .map(|(si, scale, algorithm)| {
            let group: Vec<&CellResult> = cells
                .iter()
                .filter(|c| c.scale_index == si && c.algorithm == algorithm)
                .collect();
            let ok: Vec<&CellResult> = group
                .iter()
                .copied()
                .filter(|c| c.reward.is_some())
                .collect();
            let rewards: Vec<f64> = ok.iter().filter_map(|c| c.reward).collect();
            let normalized: Vec<f64> = ok.iter().filter_map(|c| c.normalized_reward).collect();
            let times: Vec<f64> = ok.iter().filter_map(|c| c.wall_time).collect();
            SummaryRow {
                scale,
                algorithm,
                cells: group.len(),
                failures: group.len() - ok.len(),
                mean_reward: mean(&rewards),
                stddev_reward: stddev(&rewards),
                mean_normalized_reward: mean(&normalized),
                mean_wall_time: mean(&times),
                stddev_wall_time: stddev(&times),
            }
        })
        .collect()
}

fn run_cell(
    plan: &BenchPlan,
    spec: &CellSpec,
    instance: &std::result::Result<Instance, String>,
) -> CellResult {
    let scale = &plan.scales[spec.scale_index];
    let mut cell = CellResult {
        scale: scale.label.clone(),
        scale_index: spec.scale_index,
        instance_index: spec.instance_index,
        instance_seed: plan.instance_seed(spec.scale_index, spec.instance_index),
        algorithm: spec.algorithm,
        run: spec.run,
        seed: spec.seed,
        upper_bound: 0.0,
        reward: None,
        normalized_reward: None,
        wall_time: None,
        iterations: None,
        proven_optimal: false,
        solution: None,
        error: None,
    };
    let instance = match instance {
        Ok(i) => i,
        Err(e) => {
            cell.error = Some(format!("instance generation failed: {e}"));
            return cell;
        }
    };
    cell.upper_bound = instance.upper_bound_reward();
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
        plan.configs.solve(instance, spec.algorithm, spec.seed)
    }));
    match outcome {
        Ok(Ok(res)) => {
            cell.reward = Some(res.best_reward);
            cell.normalized_reward = Some(if cell.upper_bound > 0.0 {
                res.best_reward / cell.upper_bound
            } else {
                0.0
            });
            cell.wall_time = Some(res.wall_time);
            cell.iterations = Some(res.iterations_run);
            cell.proven_optimal = res.proven_optimal;
            cell.solution = Some(res.best_solution);
        }
        Ok(Err(e)) => cell.error = Some(e.to_string()),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            cell.error = Some(format!("solver panicked: {msg}"));
        }
    }
    cell
}

pub fn run_bench(plan: &BenchPlan) -> Result<BenchReport> {
    run_bench_with_progress(plan, |_, _| {})
}

/// Like [`run_bench`], calling `progress(done, total)` after each cell.
pub fn run_bench_with_progress<F>(plan: &BenchPlan, progress: F) -> Result<BenchReport>
where
    F: Fn(usize, usize) + Sync,
{
    plan.validate()?;
    let instances: Vec<Vec<std::result::Result<Instance, String>>> = plan
        .scales
        .iter()
        .enumerate()
        .map(|(si, s)| {
            (0..plan.instances_for(s))
                .map(|ii| plan.instance(si, ii).map_err(|e| e.to_string()))
                .collect()
        })
        .collect();
    let specs = plan.cells();
    let total = specs.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let exec = |spec: &CellSpec| {
        let cell = run_cell(
            plan,
            spec,
            &instances[spec.scale_index][spec.instance_index],
        );
        let d = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
        progress(d, total);
        cell
    };

    let (cells, workers) = if plan.sequential_timing {
        (specs.iter().map(exec).collect::<Vec<_>>(), 1)
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = plan.workers {
            builder = builder.num_threads(w);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
        let cells = pool.install(|| specs.par_iter().map(exec).collect::<Vec<_>>());
        (cells, pool.current_num_threads())
    };

    Ok(BenchReport {
        master_seed: plan.master_seed,
        environment: Environment::detect(workers, plan.sequential_timing),
        summary: aggregate(&cells),
        cells,
    })
}
