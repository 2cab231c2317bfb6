//! Solver configuration layering: defaults, then a TOML or JSON file, then
//! `--set section.key=value` flags.

use std::path::Path;

use etop::solver::SolverConfigs;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::files::{describe, parse_json, read_text};

pub fn load(file: Option<&Path>, overrides: &[String]) -> CliResult<SolverConfigs> {
    let mut configs = match file {
        Some(path) => parse_file(path)?,
        None => SolverConfigs::default(),
    };
    if !overrides.is_empty() {
        configs = apply_overrides(&configs, overrides)?;
    }
    configs.ga.validate()?;
    configs.aco.validate()?;
    configs.pso.validate()?;
    Ok(configs)
}

fn parse_file(path: &Path) -> CliResult<SolverConfigs> {
    let text = read_text(path)?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        return parse_json(path, &text);
    }
    let de = toml::Deserializer::parse(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: describe(e.path(), e.inner()),
    })
}

/// The value is read as JSON when possible (`0.7`, `true`, `null`) and as a
/// bare string otherwise.
fn apply_overrides(configs: &SolverConfigs, overrides: &[String]) -> CliResult<SolverConfigs> {
    let mut tree = serde_json::to_value(configs).expect("configs serialize");
    for item in overrides {
        let (key, raw) = item.split_once('=').ok_or_else(|| {
            CliError::Config(format!("override '{item}' is not of the form key=value"))
        })?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut tree;
        let parts: Vec<&str> = key.split('.').collect();
        for (depth, part) in parts.iter().enumerate() {
            let map = node
                .as_object_mut()
                .ok_or_else(|| CliError::Config(format!("'{key}' does not name a setting")))?;
            if !map.contains_key(*part) {
                return Err(CliError::Config(format!("unknown setting '{key}'")));
            }
            node = map.get_mut(*part).expect("checked above");
            if depth + 1 == parts.len() {
                *node = value.clone();
            }
        }
    }
    serde_path_to_error::deserialize(tree)
        .map_err(|e| CliError::Config(describe(e.path(), e.inner())))
}
