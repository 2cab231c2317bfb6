use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{BenchReport, CellResult, SummaryRow};
use crate::solver::Algorithm;
use crate::{Error, Result};

/// Flat CSV row of one cell (the solution itself is omitted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvCell {
    pub scale: String,
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
    pub error: Option<String>,
}

impl From<&CellResult> for CsvCell {
    fn from(c: &CellResult) -> Self {
        Self {
            scale: c.scale.clone(),
            instance_index: c.instance_index,
            instance_seed: c.instance_seed,
            algorithm: c.algorithm,
            run: c.run,
            seed: c.seed,
            upper_bound: c.upper_bound,
            reward: c.reward,
            normalized_reward: c.normalized_reward,
            wall_time: c.wall_time,
            iterations: c.iterations,
            proven_optimal: c.proven_optimal,
            error: c.error.clone(),
        }
    }
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
}

fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::InvalidArgument(format!("bad csv: {e}")))
}

pub fn cells_csv(report: &BenchReport) -> String {
    to_csv(report.cells.iter().map(CsvCell::from))
}

pub fn parse_cells_csv(text: &str) -> Result<Vec<CsvCell>> {
    from_csv(text)
}

pub fn summary_csv(report: &BenchReport) -> String {
    to_csv(&report.summary)
}

pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    from_csv(text)
}

/// Seed-determined fields only; byte-identical across reruns of a plan.
pub fn reward_table(report: &BenchReport) -> String {
    let mut out = String::from("scale,instance,algorithm,run,seed,reward\n");
    for c in &report.cells {
        let reward = c
            .reward
            .map(|r| format!("{r:?}"))
            .unwrap_or_else(|| "error".into());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.scale, c.instance_index, c.algorithm, c.run, c.seed, reward
        );
    }
    out
}

fn scales_in_order(report: &BenchReport) -> Vec<String> {
    let mut scales: Vec<String> = Vec::new();
    for row in &report.summary {
        if !scales.contains(&row.scale) {
            scales.push(row.scale.clone());
        }
    }
    scales
}

fn algorithms_in_order(report: &BenchReport) -> Vec<Algorithm> {
    let mut algs: Vec<Algorithm> = Vec::new();
    for row in &report.summary {
        if !algs.contains(&row.algorithm) {
            algs.push(row.algorithm);
        }
    }
    algs
}

/// Algorithms at `scale` sorted by mean wall time, fastest first.
pub fn time_ordering(report: &BenchReport, scale: &str) -> Vec<Algorithm> {
    let mut rows: Vec<&SummaryRow> = report
        .summary
        .iter()
        .filter(|r| r.scale == scale && r.failures < r.cells)
        .collect();
    rows.sort_by(|a, b| a.mean_wall_time.total_cmp(&b.mean_wall_time));
    rows.into_iter().map(|r| r.algorithm).collect()
}

fn ordering_note(report: &BenchReport, scale: &str) -> Option<String> {
    let order = time_ordering(report, scale);
    if order.len() < 2 {
        return None;
    }
    let text = order
        .iter()
        .map(|a| a.name())
        .collect::<Vec<_>>()
        .join(" < ");
    let reference = [Algorithm::Ga, Algorithm::Pso, Algorithm::Aco];
    let subset: Vec<Algorithm> = order
        .iter()
        .copied()
        .filter(|a| reference.contains(a))
        .collect();
    let expected: Vec<Algorithm> = reference
        .iter()
        .copied()
        .filter(|a| subset.contains(a))
        .collect();
    let verdict = if subset.len() == 3 {
        format!(
            " (ga < pso < aco: {})",
            if subset == expected { "yes" } else { "no" }
        )
    } else {
        String::new()
    };
    Some(format!(
        "  wall-time ordering, fastest first: {text}{verdict}"
    ))
}

/// Aligned plain-text summary, one block per scale.
pub fn compare_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:<6} {:>6} {:>24} {:>11} {:>24}",
        "scale", "algo", "cells", "reward (mean ± sd)", "normalized", "time s (mean ± sd)"
    );
    for scale in scales_in_order(report) {
        for row in report.summary.iter().filter(|r| r.scale == scale) {
            let cells = if row.failures > 0 {
                format!("{}!{}", row.cells - row.failures, row.failures)
            } else {
                row.cells.to_string()
            };
            let _ = writeln!(
                out,
                "{:<8} {:<6} {:>6} {:>24} {:>11.4} {:>24}",
                row.scale,
                row.algorithm.name(),
                cells,
                format!("{:.3} ± {:.3}", row.mean_reward, row.stddev_reward),
                row.mean_normalized_reward,
                format!("{:.4} ± {:.4}", row.mean_wall_time, row.stddev_wall_time),
            );
        }
        if let Some(note) = ordering_note(report, &scale) {
            out.push_str(&note);
            out.push('\n');
        }
    }
    out
}

/// Two gnuplot data blocks (`index 0` reward, `index 1` wall time); columns
/// are the scale followed by mean and stddev per algorithm.
pub fn gnuplot_columns(report: &BenchReport) -> String {
    let algs = algorithms_in_order(report);
    let mut out = String::new();
    for (title, pick) in [
        (
            "mean reward",
            (|r: &SummaryRow| (r.mean_reward, r.stddev_reward)) as fn(&SummaryRow) -> (f64, f64),
        ),
        ("mean wall time (s)", |r: &SummaryRow| {
            (r.mean_wall_time, r.stddev_wall_time)
        }),
    ] {
        let _ = writeln!(out, "# {title}");
        let header: Vec<String> = algs.iter().map(|a| format!("{a}_mean {a}_sd")).collect();
        let _ = writeln!(out, "# scale {}", header.join(" "));
        for scale in scales_in_order(report) {
            let mut line = scale.clone();
            for a in &algs {
                match report
                    .summary
                    .iter()
                    .find(|r| r.scale == scale && r.algorithm == *a)
                {
                    Some(r) => {
                        let (m, s) = pick(r);
                        let _ = write!(line, " {m} {s}");
                    }
                    None => line.push_str(" NaN NaN"),
                }
            }
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str("\n\n");
    }
    out
}
