//! `etop`: generate instances, run solvers, benchmark and plot.

mod commands;
mod config;
mod error;
mod files;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use etop::gen::Scale;
use etop::Algorithm;

#[derive(Debug, Parser)]
#[command(
    name = "etop",
    version,
    about = "Multi-UAV team orienteering solvers and benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Solve an instance with one algorithm.
    Solve(SolveArgs),
    /// Run the repeated-run benchmark.
    Bench(BenchArgs),
    /// Draw an instance and solution as SVG.
    Plot(PlotArgs),
    /// Check a solution against an instance.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    Small,
    Medium,
    Large,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Small => Scale::Small,
            ScaleArg::Medium => Scale::Medium,
            ScaleArg::Large => Scale::Large,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Ga,
    Aco,
    Pso,
    Exact,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Ga => Algorithm::Ga,
            AlgoArg::Aco => Algorithm::Aco,
            AlgoArg::Pso => Algorithm::Pso,
            AlgoArg::Exact => Algorithm::Exact,
        }
    }
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Seed; falls back to ETOP_SEED, then 0.
    #[arg(long, env = "ETOP_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Solver parameters as TOML, or JSON with a .json extension.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set aco.iterations=200`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "small")]
    pub scale: ScaleArg,
    /// Override the number of targets.
    #[arg(long)]
    pub targets: Option<usize>,
    /// Override the number of UAVs.
    #[arg(long)]
    pub uavs: Option<usize>,
    #[arg(long)]
    pub area_side: Option<f64>,
    #[arg(long)]
    pub t_max_factor: Option<f64>,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(short, long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Solution file.
    #[arg(short = 'o', long)]
    pub solution: Option<PathBuf>,
    /// Result file (reward, time, history); stdout when omitted.
    #[arg(long)]
    pub result: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// 10 instances x 10 runs on every scale instead of the reduced plan.
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub scales: Vec<ScaleArg>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub algos: Vec<AlgoArg>,
    #[arg(long)]
    pub instances: Option<usize>,
    /// Runs per instance on every scale.
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Run cells one at a time so wall times do not contend.
    #[arg(long)]
    pub sequential_timing: bool,
    /// Directory for report.json, cells.csv, rewards.csv, summary.csv,
    /// summary.txt and summary.dat.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(short, long)]
    pub instance: PathBuf,
    #[arg(short, long)]
    pub solution: PathBuf,
    /// SVG file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Size of the longer side in pixels.
    #[arg(long, default_value_t = 640.0)]
    pub size: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(short, long)]
    pub instance: PathBuf,
    #[arg(short, long)]
    pub solution: PathBuf,
    /// Print the evaluation as JSON.
    #[arg(long)]
    pub json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
