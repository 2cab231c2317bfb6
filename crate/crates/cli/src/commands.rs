use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use etop::bench::{self, BenchPlan, BenchReport};
use etop::gen::{generate, GenParams, Scale};
use etop::model::InstanceMeta;
use etop::{Algorithm, Error, Instance, Solution, SolveResult};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::files::{is_stdout, read_json, to_json, write_text};
use crate::{config, BenchArgs, Command, GenerateArgs, PlotArgs, SolveArgs, ValidateArgs};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Generate(args) => generate_cmd(args),
        Command::Solve(args) => solve_cmd(args),
        Command::Bench(args) => bench_cmd(args),
        Command::Plot(args) => plot_cmd(args),
        Command::Validate(args) => validate_cmd(args),
    }
}

fn say(to_stderr: bool, line: &str) {
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn generate_cmd(args: GenerateArgs) -> CliResult<()> {
    let scale = Scale::from(args.scale);
    let mut params = GenParams {
        seed: args.seed.seed.unwrap_or(0),
        ..scale.params()
    };
    if let Some(n) = args.targets {
        params.n_targets = n;
    }
    if let Some(k) = args.uavs {
        params.n_uavs = k;
    }
    if let Some(side) = args.area_side {
        params.area_side = side;
    }
    if let Some(f) = args.t_max_factor {
        params.t_max_factor = f;
    }
    info!(
        "resolved generator parameters: {}",
        serde_json::to_string(&params).expect("params serialize")
    );
    let mut instance = generate(&params)?;
    // keep the scale label only while the fleet and target counts are the preset's
    if args.targets.is_none() && args.uavs.is_none() {
        instance = instance.with_meta(InstanceMeta {
            seed: Some(params.seed),
            scale: Some(scale.name().to_string()),
            params: Some(params),
        });
    }
    let out = args.output.as_deref();
    write_text(out, &to_json(&instance))?;
    say(
        is_stdout(out),
        &format!(
            "{} targets, {} UAVs, t_max {:.4}",
            instance.n_targets(),
            instance.n_uavs(),
            instance.t_max()
        ),
    );
    Ok(())
}

/// Contents of the `solve --result` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub reward: f64,
    pub wall_time: f64,
    pub iterations: u64,
    pub reward_history: Vec<f64>,
    pub optimal: bool,
    pub solution: Solution,
    pub config: serde_json::Value,
}

fn solve_cmd(args: SolveArgs) -> CliResult<()> {
    let instance: Instance = read_json(&args.instance)?;
    let configs = config::load(args.config.config.as_deref(), &args.config.overrides)?;
    let algorithm = Algorithm::from(args.algo);
    let seed = args.seed.seed.unwrap_or(0);
    let section = match algorithm {
        Algorithm::Ga => serde_json::to_value(&configs.ga),
        Algorithm::Aco => serde_json::to_value(&configs.aco),
        Algorithm::Pso => serde_json::to_value(&configs.pso),
        Algorithm::Exact => serde_json::to_value(&configs.exact),
    }
    .expect("config serializes");
    info!("resolved {algorithm} config (seed {seed}): {section}");

    let result: SolveResult = match configs.solve(&instance, algorithm, seed) {
        Ok(r) => r,
        Err(Error::BudgetExceeded { budget, best }) => {
            warn!("exact search stopped after {budget} nodes; the result is not proven optimal");
            *best
        }
        Err(e) => return Err(e.into()),
    };
    let report = SolveReport {
        algorithm,
        seed,
        reward: result.best_reward,
        wall_time: result.wall_time,
        iterations: result.iterations_run,
        reward_history: result.reward_history,
        optimal: result.proven_optimal,
        solution: result.best_solution,
        config: section,
    };
    if let Some(path) = &args.solution {
        write_text(Some(path), &to_json(&report.solution))?;
    }
    write_text(args.result.as_deref(), &to_json(&report))?;
    say(
        is_stdout(args.result.as_deref()),
        &format!(
            "{algorithm}: reward {:?}{} in {:.3}s, {} iterations",
            report.reward,
            if report.optimal { " (optimal)" } else { "" },
            report.wall_time,
            report.iterations
        ),
    );
    Ok(())
}

fn bench_plan(args: &BenchArgs) -> CliResult<BenchPlan> {
    let seed = args.seed.seed.unwrap_or(0);
    let mut plan = if args.full {
        BenchPlan::full(seed)
    } else {
        BenchPlan::desk(seed)
    };
    plan.configs = config::load(args.config.config.as_deref(), &args.config.overrides)?;
    if !args.scales.is_empty() {
        let wanted: Vec<&str> = args.scales.iter().map(|s| Scale::from(*s).name()).collect();
        plan.scales.retain(|e| wanted.contains(&e.label.as_str()));
    }
    if !args.algos.is_empty() {
        plan.algorithms = args.algos.iter().map(|a| Algorithm::from(*a)).collect();
    }
    if let Some(n) = args.instances {
        plan.instances_per_scale = n;
        plan.scales.iter_mut().for_each(|s| s.instances = None);
    }
    if let Some(r) = args.runs {
        plan.runs_per_instance = r;
        plan.scales
            .iter_mut()
            .for_each(|s| s.runs_per_instance = None);
    }
    plan.workers = args.workers;
    plan.sequential_timing = args.sequential_timing;
    plan.validate()?;
    Ok(plan)
}

fn write_bench_outputs(dir: &Path, report: &BenchReport) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let outputs = [
        ("report.json", to_json(report)),
        ("cells.csv", bench::cells_csv(report)),
        ("summary.csv", bench::summary_csv(report)),
        ("summary.txt", bench::compare_table(report)),
        ("summary.dat", bench::gnuplot_columns(report)),
        ("rewards.csv", bench::reward_table(report)),
    ];
    for (name, text) in outputs {
        write_text(Some(&dir.join(name)), &text)?;
    }
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> CliResult<()> {
    let plan = bench_plan(&args)?;
    info!(
        "resolved bench plan: {}",
        serde_json::to_string(&plan).expect("plan serializes")
    );
    let last_decile = AtomicUsize::new(0);
    let report = bench::run_bench_with_progress(&plan, |done, total| {
        let decile = done * 10 / total;
        if last_decile.fetch_max(decile, Ordering::Relaxed) < decile {
            info!("{done}/{total} cells done");
        }
    })?;
    let failures: usize = report.summary.iter().map(|r| r.failures).sum();
    if failures > 0 {
        warn!("{failures} cells failed; see the error column of cells.csv");
    }
    if let Some(dir) = &args.out_dir {
        write_bench_outputs(dir, &report)?;
        info!("wrote reports to {}", dir.display());
    }
    write_text(None, &bench::compare_table(&report))?;
    Ok(())
}

fn plot_cmd(args: PlotArgs) -> CliResult<()> {
    let instance: Instance = read_json(&args.instance)?;
    let solution: Solution = read_json(&args.solution)?;
    let svg = crate::plot::render(&instance, &solution, args.size)?;
    write_text(args.output.as_deref(), &svg)
}

fn validate_cmd(args: ValidateArgs) -> CliResult<()> {
    let instance: Instance = read_json(&args.instance)?;
    let solution: Solution = read_json(&args.solution)?;
    let eval = instance.evaluate(&solution)?;
    if args.json {
        write_text(None, &to_json(&eval))?;
    } else {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "feasible: {}",
            if eval.is_feasible() { "yes" } else { "no" }
        );
        let _ = writeln!(out, "reward: {:?}", eval.total_reward);
        let _ = writeln!(
            out,
            "collected: {}/{} targets",
            eval.collected_count(),
            instance.n_targets()
        );
        for (k, route) in solution.routes.iter().enumerate() {
            let _ = write!(
                out,
                "uav {k}: speed {}, {} targets, time {:.6}",
                instance.speeds()[k],
                route.len(),
                eval.per_uav_time[k]
            );
            if let Some(i) = eval.truncated_at[k] {
                let _ = write!(out, ", truncated at position {i} (target {})", route[i]);
            }
            out.push('\n');
        }
        write_text(None, &out)?;
    }
    match eval
        .truncated_at
        .iter()
        .enumerate()
        .find_map(|(k, t)| t.map(|i| (k, i)))
    {
        Some((k, i)) => Err(CliError::Rejected(format!(
            "infeasible: UAV {k} cannot finish target {} by t_max",
            solution.routes[k][i]
        ))),
        None => Ok(()),
    }
}
