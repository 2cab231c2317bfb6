use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use regex::Regex;
use serde_json::Value;
use tempfile::TempDir;

fn etop(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etop"))
        .args(args)
        .current_dir(dir)
        .env_remove("ETOP_SEED")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = etop(dir, args);
    assert!(
        out.status.success(),
        "etop {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn gen_small(dir: &Path, name: &str, extra: &[&str]) {
    let mut args = vec!["generate", "-o", name];
    args.extend_from_slice(extra);
    ok(dir, &args);
}

#[test]
fn generate_small_scale() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "generate", "--scale", "small", "--seed", "42", "-o", "a.json",
        ],
    );
    ok(
        d,
        &[
            "generate", "--scale", "small", "--seed", "42", "-o", "b.json",
        ],
    );
    let inst = json(d.join("a.json"));
    assert_eq!(inst["targets"].as_array().unwrap().len(), 30);
    assert_eq!(inst["speeds"].as_array().unwrap().len(), 5);
    assert_eq!(inst["meta"]["scale"], "small");
    assert_eq!(
        fs::read(d.join("a.json")).unwrap(),
        fs::read(d.join("b.json")).unwrap()
    );
}

#[test]
fn seed_falls_back_to_environment() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["generate", "--seed", "9", "-o", "flag.json"]);
    let out = Command::new(env!("CARGO_BIN_EXE_etop"))
        .args(["generate", "-o", "env.json"])
        .current_dir(d)
        .env("ETOP_SEED", "9")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read(d.join("flag.json")).unwrap(),
        fs::read(d.join("env.json")).unwrap()
    );
}

#[test]
fn usage_and_io_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(
        etop(d, &["generate", "--scale", "tiny"]).status.code(),
        Some(2)
    );
    assert_eq!(etop(d, &["solve", "--algo", "ga"]).status.code(), Some(2));
    assert_eq!(
        etop(d, &["solve", "-i", "missing.json", "--algo", "ga"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        etop(d, &["generate", "-o", "no/such/dir/x.json"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn malformed_instance_names_the_field() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("bad.json"),
        "{\n  \"depot\": {\"x\": 0, \"y\": 0},\n  \"targets\": [{\"id\": 1, \"x\": 1, \"y\": 1, \"reward\": \"ten\", \"service_time\": 0}],\n  \"speeds\": [1],\n  \"t_max\": 5\n}\n",
    )
    .unwrap();
    let out = etop(d, &["solve", "-i", "bad.json", "--algo", "ga"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("targets[0].reward"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn invalid_solver_config_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    gen_small(d, "i.json", &["--targets", "6", "--uavs", "2"]);
    fs::write(d.join("c.toml"), "[ga]\ncrossover_rate = 1.5\n").unwrap();
    let out = etop(
        d,
        &[
            "solve", "-i", "i.json", "--algo", "ga", "--config", "c.toml",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    fs::write(d.join("c.toml"), "[ga]\nno_such_field = 1\n").unwrap();
    let out = etop(
        d,
        &[
            "solve", "-i", "i.json", "--algo", "ga", "--config", "c.toml",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_field"));
}

#[test]
fn config_layering_file_then_flags() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    gen_small(d, "i.json", &["--targets", "6", "--uavs", "2"]);
    fs::write(d.join("c.toml"), "[aco]\niterations = 7\nm_groups = 3\n").unwrap();
    ok(
        d,
        &[
            "solve",
            "-i",
            "i.json",
            "--algo",
            "aco",
            "--config",
            "c.toml",
            "--result",
            "file.json",
        ],
    );
    let r = json(d.join("file.json"));
    assert_eq!(r["iterations"], 7);
    assert_eq!(r["config"]["m_groups"], 3);
    ok(
        d,
        &[
            "solve",
            "-i",
            "i.json",
            "--algo",
            "aco",
            "--config",
            "c.toml",
            "--set",
            "aco.iterations=4",
            "--result",
            "flag.json",
        ],
    );
    let r = json(d.join("flag.json"));
    assert_eq!(r["iterations"], 4);
    assert_eq!(r["config"]["m_groups"], 3);
}

#[test]
fn solve_is_deterministic_and_consistent_with_validate() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    gen_small(d, "s.json", &["--seed", "42"]);
    let args = |sol: &'static str, res: &'static str| {
        vec![
            "solve", "-i", "s.json", "--algo", "ga", "--seed", "7", "-o", sol, "--result", res,
        ]
    };
    ok(d, &args("s1.json", "r1.json"));
    ok(d, &args("s2.json", "r2.json"));
    assert_eq!(
        fs::read(d.join("s1.json")).unwrap(),
        fs::read(d.join("s2.json")).unwrap()
    );

    let result = json(d.join("r1.json"));
    assert!(result["wall_time"].as_f64().unwrap() >= 0.0);
    assert!(!result["reward_history"].as_array().unwrap().is_empty());
    let out = ok(d, &["validate", "-i", "s.json", "-s", "s1.json", "--json"]);
    let eval: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        eval["total_reward"].as_f64().unwrap().to_bits(),
        result["reward"].as_f64().unwrap().to_bits()
    );
}

#[test]
fn exact_solve_reports_optimal() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    gen_small(
        d,
        "n8.json",
        &["--targets", "8", "--uavs", "2", "--seed", "5"],
    );
    ok(
        d,
        &[
            "solve", "-i", "n8.json", "--algo", "exact", "-o", "sol.json", "--result", "res.json",
        ],
    );
    assert_eq!(json(d.join("res.json"))["optimal"], true);
    let out = ok(d, &["validate", "-i", "n8.json", "-s", "sol.json"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("feasible: yes"));
    assert!(!text.contains("truncated"));

    gen_small(d, "big.json", &["--targets", "12", "--uavs", "2"]);
    assert_eq!(
        etop(d, &["solve", "-i", "big.json", "--algo", "exact"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn validate_reports_violations() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    gen_small(d, "i.json", &["--targets", "4", "--uavs", "2"]);
    fs::write(d.join("dup.json"), r#"{"routes": [[1, 2], [2]]}"#).unwrap();
    let out = etop(d, &["validate", "-i", "i.json", "-s", "dup.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("more than once"));

    fs::write(d.join("empty.json"), r#"{"routes": [[], []]}"#).unwrap();
    let out = ok(d, &["validate", "-i", "i.json", "-s", "empty.json"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("feasible: yes"));
    assert!(text.contains("reward: 0.0"));

    // unreachable deadline: every non-empty route is truncated
    gen_small(
        d,
        "tight.json",
        &["--targets", "4", "--uavs", "2", "--t-max-factor", "0.0001"],
    );
    fs::write(d.join("all.json"), r#"{"routes": [[1, 2], [3, 4]]}"#).unwrap();
    let out = etop(d, &["validate", "-i", "tight.json", "-s", "all.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("feasible: no"));
}

struct Circle {
    id: usize,
    reward: f64,
    r: f64,
    reached: bool,
}

fn circles(svg: &str) -> Vec<Circle> {
    let re = Regex::new(
        r#"<circle class="target (reached|unreached)" data-id="(\d+)" data-reward="([^"]+)" cx="[^"]+" cy="[^"]+" r="([^"]+)" fill="(blue|red)""#,
    )
    .unwrap();
    re.captures_iter(svg)
        .map(|c| {
            let reached = &c[1] == "reached";
            assert_eq!(&c[5], if reached { "blue" } else { "red" });
            Circle {
                id: c[2].parse().unwrap(),
                reward: c[3].parse().unwrap(),
                r: c[4].parse().unwrap(),
                reached,
            }
        })
        .collect()
}

fn polylines(svg: &str) -> Vec<Vec<usize>> {
    let re =
        Regex::new(r#"<polyline class="route" data-uav="\d+" data-targets="([^"]*)""#).unwrap();
    re.captures_iter(svg)
        .map(|c| {
            c[1].split_whitespace()
                .map(|t| t.parse().unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn plot_structure() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    gen_small(d, "i.json", &["--seed", "3"]);
    ok(
        d,
        &[
            "solve", "-i", "i.json", "--algo", "aco", "-o", "sol.json", "--result", "r.json",
        ],
    );
    ok(
        d,
        &["plot", "-i", "i.json", "-s", "sol.json", "-o", "map.svg"],
    );
    let svg = fs::read_to_string(d.join("map.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains(r#"class="depot""#) && svg.contains(r#"fill="black""#));

    let cs = circles(&svg);
    assert_eq!(cs.len(), 30);
    let lines = polylines(&svg);
    for c in &cs {
        let hits: usize = lines
            .iter()
            .map(|l| l.iter().filter(|&&t| t == c.id).count())
            .sum();
        assert_eq!(hits, usize::from(c.reached), "target {}", c.id);
    }
    let mut by_reward: Vec<&Circle> = cs.iter().collect();
    by_reward.sort_by(|a, b| a.reward.total_cmp(&b.reward));
    assert!(by_reward.windows(2).all(|w| w[0].r <= w[1].r));
    let k = cs[0].r / cs[0].reward;
    assert!(cs.iter().all(|c| (c.r / c.reward - k).abs() < 1e-4 * k));

    fs::write(d.join("empty.json"), r#"{"routes": [[], [], [], [], []]}"#).unwrap();
    let out = ok(d, &["plot", "-i", "i.json", "-s", "empty.json"]);
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(polylines(&svg).is_empty());
    assert!(circles(&svg).iter().all(|c| !c.reached));

    fs::write(d.join("wrong.json"), r#"{"routes": [[1]]}"#).unwrap();
    assert_eq!(
        etop(d, &["plot", "-i", "i.json", "-s", "wrong.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bench_writes_all_reports() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let args = [
        "bench",
        "--scales",
        "small",
        "--instances",
        "2",
        "--runs",
        "1",
        "--algos",
        "aco,ga",
        "--set",
        "ga.stagnation_limit=20",
        "--set",
        "aco.iterations=5",
        "--seed",
        "3",
        "--workers",
        "2",
    ];
    let mut a = args.to_vec();
    a.extend(["--out-dir", "one"]);
    let out = ok(d, &a);
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("small") && table.contains("aco") && table.contains("ga"));
    for f in [
        "report.json",
        "cells.csv",
        "summary.csv",
        "summary.txt",
        "summary.dat",
        "rewards.csv",
    ] {
        assert!(d.join("one").join(f).exists(), "{f}");
    }
    let report = json(d.join("one/report.json"));
    assert_eq!(report["cells"].as_array().unwrap().len(), 4);

    let mut b = args.to_vec();
    b.extend(["--out-dir", "two", "--sequential-timing"]);
    ok(d, &b);
    assert_eq!(
        fs::read(d.join("one/rewards.csv")).unwrap(),
        fs::read(d.join("two/rewards.csv")).unwrap()
    );
}
